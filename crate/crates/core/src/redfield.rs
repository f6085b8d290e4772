//! Bloch–Redfield master equation in the eigenbasis of the system
//! Hamiltonian.
//!
//! For Hermitian couplings `A_α` with spectra `S_α` (no cross-correlations)
//! the relaxation tensor is
//!
//! ```text
//! R_abcd = −½ Σ_α [ δ_bd Σ_n A_an A_nc S(ω_cn) − A_ac A_db S(ω_ca)
//!                 + δ_ac Σ_n A_dn A_nb S(ω_dn) − A_ac A_db S(ω_db) ]
//! ```
//!
//! with `ω_mn = ω_m − ω_n`, so `S(ω > 0)` drives emission. The Lamb shift
//! is not included.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{evolve_density_mapped, EvolutionResult, PositivityPolicy, SolverOptions};
use crate::linalg::{c, eigh, DensityMatrix, HilbertSpace, Operator, C64, ZERO};
use crate::noise::NoiseSpectrum;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    couplings: Vec<(Operator, NoiseSpectrum)>,
}

impl CouplingSpec {
    pub fn new(couplings: Vec<(Operator, NoiseSpectrum)>) -> Result<Self> {
        for (a, s) in &couplings {
            a.ensure_hermitian()?;
            s.validate()?;
        }
        Ok(Self { couplings })
    }

    pub fn single(a: Operator, spectrum: NoiseSpectrum) -> Result<Self> {
        Self::new(vec![(a, spectrum)])
    }

    pub fn couplings(&self) -> &[(Operator, NoiseSpectrum)] {
        &self.couplings
    }

    /// Correlated noise between different couplings is not modelled.
    pub fn add_cross_spectrum(&mut self, i: usize, j: usize, _spectrum: NoiseSpectrum) -> Result<()> {
        Err(Error::InvalidArgument(format!(
            "cross-correlated spectra between couplings {i} and {j} are not supported"
        )))
    }
}

/// Rule for dropping non-secular terms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SecularCutoff {
    /// One tenth of the smallest nonzero `|ω_ab − ω_cd|`.
    #[default]
    Auto,
    /// Keep terms with `|ω_ab − ω_cd| ≤ value`.
    Value(f64),
    /// Keep every term. Positivity is not guaranteed.
    None,
}

#[derive(Debug, Clone)]
pub struct BRTensor {
    /// Generator acting on column-stacked eigenbasis density matrices,
    /// including the free `−iω_ab` part.
    generator: DMatrix<C64>,
    energies: Vec<f64>,
    eigenvectors: DMatrix<C64>,
    secular_cutoff: f64,
    space: HilbertSpace,
}

impl BRTensor {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn secular_cutoff(&self) -> f64 {
        self.secular_cutoff
    }

    pub fn is_secular(&self) -> bool {
        self.secular_cutoff.is_finite()
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn generator(&self) -> &DMatrix<C64> {
        &self.generator
    }

    /// Relaxation element `R_abcd` (free evolution excluded).
    pub fn r(&self, a: usize, b: usize, c_: usize, d: usize) -> C64 {
        let n = self.dim();
        let mut v = self.generator[(a + n * b, c_ + n * d)];
        if a == c_ && b == d {
            v += C64::new(0.0, self.energies[a] - self.energies[b]);
        }
        v
    }

    /// Largest `|Σ_a R_aacd|` over all `(c, d)`.
    pub fn trace_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for cc in 0..n {
            for d in 0..n {
                let s: C64 = (0..n).map(|a| self.r(a, a, cc, d)).sum();
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// Express a lab-frame matrix in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    pub fn from_eigenbasis(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        &self.eigenvectors * m * self.eigenvectors.adjoint()
    }
}

fn auto_cutoff(energies: &[f64]) -> f64 {
    let n = energies.len();
    let scale = energies.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(1.0);
    let mut smallest = f64::INFINITY;
    let mut diffs = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            diffs.push(energies[a] - energies[b]);
        }
    }
    for &x in &diffs {
        for &y in &diffs {
            let g = (x - y).abs();
            if g > 1e-10 * scale {
                smallest = smallest.min(g);
            }
        }
    }
    if smallest.is_finite() { 0.1 * smallest } else { 0.0 }
}

/// Build the Bloch–Redfield tensor of `h` for the given couplings.
pub fn br_tensor(h: &Operator, couplings: &CouplingSpec, cutoff: SecularCutoff) -> Result<BRTensor> {
    h.ensure_hermitian()?;
    for (a, _) in couplings.couplings() {
        if a.space() != h.space() {
            return Err(Error::SpaceMismatch(format!("coupling on {} vs hamiltonian on {}", a.space(), h.space())));
        }
    }
    let (energies, vecs) = eigh(h.matrix());
    let n = energies.len();
    let cutoff = match cutoff {
        SecularCutoff::Auto => auto_cutoff(&energies),
        SecularCutoff::Value(v) => {
            if !(v >= 0.0) {
                return Err(Error::InvalidArgument(format!("secular cutoff must be non-negative, got {v}")));
            }
            v
        }
        SecularCutoff::None => f64::INFINITY,
    };
    let scale = energies.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(1.0);
    let slack = 1e-12 * scale;

    // Eigenbasis couplings and spectra sampled at every transition.
    let mut blocks: Vec<(DMatrix<C64>, DMatrix<f64>)> = Vec::new();
    for (a, spec) in couplings.couplings() {
        let a_eig = vecs.adjoint() * a.matrix() * &vecs;
        let mut s = DMatrix::<f64>::zeros(n, n);
        for m in 0..n {
            for k in 0..n {
                let involved = (0..n).any(|j| a_eig[(m, j)].norm() > 0.0 && a_eig[(j, k)].norm() > 0.0)
                    || a_eig[(m, k)].norm() > 0.0;
                let w = energies[m] - energies[k];
                s[(m, k)] = match spec.eval(w) {
                    Ok(v) => v,
                    Err(e) if involved => return Err(e),
                    Err(_) => 0.0,
                };
            }
        }
        blocks.push((a_eig, s));
    }

    let omega = |x: usize, y: usize| energies[x] - energies[y];
    let rows: Vec<Vec<C64>> = (0..n * n)
        .into_par_iter()
        .map(|row| {
            let (a, b) = (row % n, row / n);
            let mut out = vec![ZERO; n * n];
            for d in 0..n {
                for cc in 0..n {
                    if (omega(a, b) - omega(cc, d)).abs() > cutoff + slack {
                        continue;
                    }
                    let mut acc = ZERO;
                    for (am, s) in &blocks {
                        if b == d {
                            for k in 0..n {
                                acc += am[(a, k)] * am[(k, cc)] * s[(cc, k)];
                            }
                        }
                        acc -= am[(a, cc)] * am[(d, b)] * s[(cc, a)];
                        if a == cc {
                            for k in 0..n {
                                acc += am[(d, k)] * am[(k, b)] * s[(d, k)];
                            }
                        }
                        acc -= am[(a, cc)] * am[(d, b)] * s[(d, b)];
                    }
                    out[cc + n * d] = acc * c(-0.5, 0.0);
                }
            }
            out[row] += C64::new(0.0, -omega(a, b));
            out
        })
        .collect();
    let mut generator = DMatrix::<C64>::zeros(n * n, n * n);
    for (row, vals) in rows.into_iter().enumerate() {
        for (col, v) in vals.into_iter().enumerate() {
            generator[(row, col)] = v;
        }
    }
    Ok(BRTensor { generator, energies, eigenvectors: vecs, secular_cutoff: cutoff, space: h.space().clone() })
}

/// Evolve in the eigenbasis and report lab-frame states.
///
/// Without secular filtering the positivity check only reports
/// excursions in the diagnostics.
pub fn solve_br(tensor: &BRTensor, rho0: &DensityMatrix, grid: &[f64], opts: &SolverOptions) -> Result<EvolutionResult> {
    if rho0.space() != tensor.space() {
        return Err(Error::SpaceMismatch(format!("initial state on {} vs tensor on {}", rho0.space(), tensor.space())));
    }
    let mut opts = opts.clone();
    if !tensor.is_secular() {
        opts.positivity = PositivityPolicy::Report;
    }
    let n = tensor.dim();
    let g = &tensor.generator;
    let rhs = |_t: f64, rho: &DMatrix<C64>| {
        let v = nalgebra::DVector::from_column_slice(rho.as_slice());
        let out = g * v;
        DMatrix::from_column_slice(n, n, out.as_slice())
    };
    let y0 = tensor.to_eigenbasis(rho0.matrix());
    evolve_density_mapped(rhs, &y0, rho0.space(), grid, &opts, true, |_, m| tensor.from_eigenbasis(&m))
}
