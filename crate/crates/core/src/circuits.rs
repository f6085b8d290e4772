//! Superconducting circuit and cavity-QED Hamiltonians.
//!
//! Units: ħ = 1 and every energy is an angular frequency.
//!
//! Charge-basis (Cooper-pair box / transmon) and phase-grid (fluxonium)
//! Hamiltonians are real symmetric tridiagonal matrices. Their low-lying
//! spectra are computed with Sturm-sequence bisection and inverse
//! iteration, which scales to the fine grids needed for converged fluxonium
//! levels. Dense builders are provided for small problems and as oracles.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, ops, HilbertSpace, Operator, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CircuitParams {
    /// Charging energy.
    pub e_c: f64,
    /// Josephson energy.
    pub e_j: f64,
    /// Inductive energy; zero for a Cooper-pair box.
    #[serde(default)]
    pub e_l: f64,
    /// Offset charge in units of 2e.
    #[serde(default)]
    pub n_ext: f64,
    /// External flux phase in radians.
    #[serde(default)]
    pub phi_ext: f64,
}

impl CircuitParams {
    pub fn transmon(e_c: f64, e_j: f64, n_ext: f64) -> Self {
        Self { e_c, e_j, e_l: 0.0, n_ext, phi_ext: 0.0 }
    }

    pub fn fluxonium(e_c: f64, e_j: f64, e_l: f64, phi_ext: f64) -> Self {
        Self { e_c, e_j, e_l, n_ext: 0.0, phi_ext }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.e_c, self.e_j, self.e_l, self.n_ext, self.phi_ext].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("circuit parameters must be finite".into()));
        }
        if self.e_c <= 0.0 {
            return Err(Error::InvalidArgument(format!("E_C must be positive, got {}", self.e_c)));
        }
        if self.e_j < 0.0 {
            return Err(Error::InvalidArgument(format!("E_J must be non-negative, got {}", self.e_j)));
        }
        if self.e_l < 0.0 {
            return Err(Error::InvalidArgument(format!("E_L must be non-negative, got {}", self.e_l)));
        }
        Ok(())
    }
}

/// Uniform phase grid `phi_min + k·dφ`, `k = 0..points`, end points included.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhaseGrid {
    pub phi_min: f64,
    pub phi_max: f64,
    pub points: usize,
}

impl PhaseGrid {
    pub fn new(phi_min: f64, phi_max: f64, points: usize) -> Self {
        Self { phi_min, phi_max, points }
    }

    pub fn spacing(&self) -> f64 {
        (self.phi_max - self.phi_min) / (self.points - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.phi_min + self.spacing() * k as f64
    }

    /// Same interval with twice the resolution.
    pub fn refined(&self) -> Self {
        Self { points: 2 * self.points - 1, ..*self }
    }

    fn validate(&self) -> Result<()> {
        if self.points < 64 {
            return Err(Error::InvalidArgument(format!("phase grid needs at least 64 points, got {}", self.points)));
        }
        if !(self.phi_max > self.phi_min) || !self.phi_min.is_finite() || !self.phi_max.is_finite() {
            return Err(Error::InvalidArgument("phase grid bounds must be finite with phi_max > phi_min".into()));
        }
        Ok(())
    }
}

/// Which representation a spectrum was computed in.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisInfo {
    Charge { ncut: usize, n_ext: f64 },
    Phase(PhaseGrid),
    Dense { dim: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Ascending eigenvalues.
    pub energies: Vec<f64>,
    /// Eigenvectors as columns, in the order of `energies`.
    pub states: DMatrix<C64>,
    pub basis: BasisInfo,
}

impl SpectrumResult {
    pub fn transition(&self, i: usize, j: usize) -> f64 {
        self.energies[j] - self.energies[i]
    }

    pub fn state(&self, k: usize) -> DVector<C64> {
        self.states.column(k).into_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QubitParameters {
    pub omega_q: f64,
    /// `(E2 − E1) − (E1 − E0)`; absent when fewer than three levels exist.
    pub anharmonicity: Option<f64>,
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal needs n diagonal and n-1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(self.diag[i], 0.0);
        }
        for (i, &e) in self.off.iter().enumerate() {
            m[(i, i + 1)] = c(e, 0.0);
            m[(i + 1, i)] = c(e, 0.0);
        }
        m
    }

    /// `y = T x` for a real vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// `⟨a|T|b⟩` for real vectors.
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> f64 {
        self.apply(b).iter().zip(a).map(|(x, y)| x * y).sum()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let scale = self.gershgorin_scale();
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let e = self.off[i - 1];
            q = (self.diag[i] - x) - e * e / q;
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin_scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.dim(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(T − shift) x = b` with partial pivoting.
    fn shifted_solve(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::EPSILON * self.gershgorin_scale().max(1.0);
        if n == 1 {
            let d = self.diag[0] - shift;
            let d = if d.abs() < tiny { tiny } else { d };
            return vec![b[0] / d];
        }
        // Banded LU with row swaps: U has up to two super-diagonals.
        let mut u0: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let mut u1: Vec<f64> = self.off.clone();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut lower: Vec<f64> = self.off.clone();
        let mut rhs = b.to_vec();
        let mut sub: Vec<f64> = vec![0.0; n];
        for i in 0..n - 1 {
            let below = lower[i];
            if below.abs() > u0[i].abs() {
                // swap rows i and i+1
                let (r_d, r_1, r_2) = (below, u0[i + 1], if i + 1 < n - 1 { u1[i + 1] } else { 0.0 });
                let (o_d, o_1, o_2) = (u0[i], u1[i], u2[i]);
                u0[i] = r_d;
                u1[i] = r_1;
                u2[i] = r_2;
                rhs.swap(i, i + 1);
                let m = o_d / r_d;
                sub[i] = m;
                u0[i + 1] = o_1 - m * r_1;
                if i + 1 < n - 1 {
                    u1[i + 1] = o_2 - m * r_2;
                }
            } else {
                let piv = if u0[i].abs() < tiny { tiny } else { u0[i] };
                u0[i] = piv;
                let m = below / piv;
                sub[i] = m;
                u0[i + 1] -= m * u1[i];
                if i + 1 < n - 1 {
                    u1[i + 1] -= m * u2[i];
                }
            }
            rhs[i + 1] -= sub[i] * rhs[i];
            lower[i] = 0.0;
        }
        if u0[n - 1].abs() < tiny {
            u0[n - 1] = tiny;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= u2[i] * x[i + 2];
            }
            x[i] = acc / u0[i];
        }
        x
    }

    /// Lowest `count` eigenpairs. Eigenvectors are real, normalized, and
    /// carry a positive first significant component.
    pub fn lowest(&self, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = self.dim();
        if count == 0 || count > n {
            return Err(Error::InvalidArgument(format!("requested {count} levels from a {n}-dimensional problem")));
        }
        let values: Vec<f64> = (0..count).map(|k| self.eigenvalue(k)).collect();
        let scale = self.gershgorin_scale().max(1.0);
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
        for (k, &lambda) in values.iter().enumerate() {
            // Deterministic pseudo-random start vector.
            let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (((i * 7919 + k * 104729) % 1013) as f64 / 1013.0)).collect();
            let cluster: Vec<usize> = (0..k).filter(|&j| (values[j] - lambda).abs() < 1e-8 * scale).collect();
            for _ in 0..4 {
                x = self.shifted_solve(lambda, &x);
                for &j in &cluster {
                    let p: f64 = x.iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
                    for (xi, vj) in x.iter_mut().zip(&vectors[j]) {
                        *xi -= p * vj;
                    }
                }
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !(norm > 0.0) || !norm.is_finite() {
                    return Err(Error::NotConverged(format!("inverse iteration failed for level {k}")));
                }
                for xi in x.iter_mut() {
                    *xi /= norm;
                }
            }
            let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if let Some(first) = x.iter().find(|v| v.abs() > 1e-3 * peak) {
                if *first < 0.0 {
                    for xi in x.iter_mut() {
                        *xi = -*xi;
                    }
                }
            }
            vectors.push(x);
        }
        Ok((values, vectors))
    }
}

/// Charge-basis Hamiltonian on `n ∈ [−ncut, ncut]`.
pub fn cpb_tridiagonal(params: &CircuitParams, ncut: usize) -> Result<SymTridiagonal> {
    params.validate()?;
    if params.e_l != 0.0 {
        return Err(Error::InvalidArgument(
            "charge basis requires E_L = 0; use fluxonium_hamiltonian for inductively shunted circuits".into(),
        ));
    }
    if ncut < 1 {
        return Err(Error::InvalidArgument("charge cutoff must be at least 1".into()));
    }
    let n = 2 * ncut + 1;
    let diag = (0..n)
        .map(|k| {
            let charge = k as f64 - ncut as f64 - params.n_ext;
            4.0 * params.e_c * charge * charge
        })
        .collect();
    let off = vec![-params.e_j / 2.0; n - 1];
    SymTridiagonal::new(diag, off)
}

pub fn cpb_hamiltonian(params: &CircuitParams, ncut: usize) -> Result<Operator> {
    let t = cpb_tridiagonal(params, ncut)?;
    Operator::new(t.to_dense(), HilbertSpace::qudit(t.dim()))
}

fn fluxonium_potential(params: &CircuitParams, phi: f64) -> f64 {
    0.5 * params.e_l * phi * phi - params.e_j * (phi - params.phi_ext).cos()
}

/// Phase-grid Hamiltonian `−4E_C ∂²/∂φ² + ½E_Lφ² − E_J cos(φ − φ_ext)` with
/// hard walls just outside the grid.
pub fn fluxonium_tridiagonal(params: &CircuitParams, grid: &PhaseGrid) -> Result<SymTridiagonal> {
    params.validate()?;
    if params.e_l <= 0.0 {
        return Err(Error::InvalidArgument(format!("fluxonium requires E_L > 0, got {}", params.e_l)));
    }
    grid.validate()?;
    let d = grid.spacing();
    let kinetic = 4.0 * params.e_c / (d * d);
    let potential: Vec<f64> = (0..grid.points).map(|k| fluxonium_potential(params, grid.point(k))).collect();
    let argmin = potential
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    if argmin == 0 || argmin == grid.points - 1 {
        log::warn!(
            "fluxonium potential minimum lies on the grid boundary [{}, {}]; widen the grid",
            grid.phi_min,
            grid.phi_max
        );
    }
    let diag = potential.iter().map(|v| v + 2.0 * kinetic).collect();
    let off = vec![-kinetic; grid.points - 1];
    SymTridiagonal::new(diag, off)
}

pub fn fluxonium_hamiltonian(params: &CircuitParams, grid: &PhaseGrid) -> Result<Operator> {
    let t = fluxonium_tridiagonal(params, grid)?;
    Operator::new(t.to_dense(), HilbertSpace::qudit(t.dim()))
}

fn spectrum_from_tridiagonal(t: &SymTridiagonal, levels: usize, basis: BasisInfo) -> Result<SpectrumResult> {
    let (energies, vectors) = t.lowest(levels)?;
    let n = t.dim();
    let states = DMatrix::from_fn(n, levels, |i, k| c(vectors[k][i], 0.0));
    Ok(SpectrumResult { energies, states, basis })
}

/// Lowest `levels` eigenpairs of the charge-basis Hamiltonian.
pub fn cpb_spectrum(params: &CircuitParams, ncut: usize, levels: usize) -> Result<SpectrumResult> {
    let t = cpb_tridiagonal(params, ncut)?;
    spectrum_from_tridiagonal(&t, levels, BasisInfo::Charge { ncut, n_ext: params.n_ext })
}

/// Lowest `levels` eigenpairs of the phase-grid Hamiltonian.
pub fn fluxonium_spectrum(params: &CircuitParams, grid: &PhaseGrid, levels: usize) -> Result<SpectrumResult> {
    let t = fluxonium_tridiagonal(params, grid)?;
    spectrum_from_tridiagonal(&t, levels, BasisInfo::Phase(*grid))
}

/// Largest change of the lowest `levels` energies when the charge cutoff is
/// doubled. Small values indicate a converged cutoff.
pub fn cpb_cutoff_change(params: &CircuitParams, ncut: usize, levels: usize) -> Result<f64> {
    let a = cpb_spectrum(params, ncut, levels)?;
    let b = cpb_spectrum(params, 2 * ncut, levels)?;
    Ok(a.energies.iter().zip(&b.energies).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Circuit representation used for spectra and sensitivities.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "basis")]
pub enum CircuitModel {
    Charge { ncut: usize },
    Phase { phi_min: f64, phi_max: f64, points: usize },
}

impl CircuitModel {
    pub fn tridiagonal(&self, params: &CircuitParams) -> Result<SymTridiagonal> {
        match *self {
            CircuitModel::Charge { ncut } => cpb_tridiagonal(params, ncut),
            CircuitModel::Phase { phi_min, phi_max, points } => {
                fluxonium_tridiagonal(params, &PhaseGrid::new(phi_min, phi_max, points))
            }
        }
    }

    pub fn spectrum(&self, params: &CircuitParams, levels: usize) -> Result<SpectrumResult> {
        match *self {
            CircuitModel::Charge { ncut } => cpb_spectrum(params, ncut, levels),
            CircuitModel::Phase { phi_min, phi_max, points } => {
                fluxonium_spectrum(params, &PhaseGrid::new(phi_min, phi_max, points), levels)
            }
        }
    }
}

/// Dense diagonalization of a Hermitian operator.
pub fn diagonalize(op: &Operator) -> Result<SpectrumResult> {
    op.ensure_hermitian()?;
    let (energies, states) = eigh(op.matrix());
    Ok(SpectrumResult { energies, states, basis: BasisInfo::Dense { dim: op.dim() } })
}

pub fn qubit_parameters(spec: &SpectrumResult) -> Result<QubitParameters> {
    qubit_parameters_from_energies(&spec.energies)
}

pub fn qubit_parameters_from_energies(e: &[f64]) -> Result<QubitParameters> {
    if e.len() < 2 {
        return Err(Error::InvalidArgument("qubit frequency needs at least two levels".into()));
    }
    let omega_q = e[1] - e[0];
    let anharmonicity = if e.len() >= 3 { Some((e[2] - e[1]) - omega_q) } else { None };
    Ok(QubitParameters { omega_q, anharmonicity })
}

/// `ω_c(a†a + ½) + (ω_q/2)σz + g(a†σ− + σ+a)` on the space
/// `(nmax + 1) ⊗ 2`, cavity first.
pub fn jc_hamiltonian(omega_c: f64, omega_q: f64, g: f64, nmax: usize) -> Result<Operator> {
    if nmax < 1 {
        return Err(Error::InvalidArgument("Fock cutoff must be at least 1".into()));
    }
    let d = nmax + 1;
    let a = ops::destroy(d);
    let ad = ops::create(d);
    let id_c = ops::identity(d);
    let id_q = ops::identity(2);
    let cavity = (&ops::number(d) + &id_c.scaled(c(0.5, 0.0))).scaled(c(omega_c, 0.0)).tensor(&id_q);
    let qubit = id_c.tensor(&ops::sigma_z().scaled(c(omega_q / 2.0, 0.0)));
    let coupling = &ad.tensor(&ops::sigma_minus()) + &a.tensor(&ops::sigma_plus());
    Ok(&(&cavity + &qubit) + &coupling.scaled(c(g, 0.0)))
}

/// Excitation number `a†a + |e⟩⟨e|` on the Jaynes–Cummings space.
pub fn jc_excitation_number(nmax: usize) -> Operator {
    let d = nmax + 1;
    &ops::number(d).tensor(&ops::identity(2)) + &ops::identity(d).tensor(&ops::projector(2, 1))
}

fn check_levels_and_couplings(levels: &[f64], g: &DMatrix<C64>) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("at least one level is required".into()));
    }
    if g.nrows() != levels.len() || g.ncols() != levels.len() {
        return Err(Error::SpaceMismatch(format!(
            "coupling matrix {}x{} for {} levels",
            g.nrows(),
            g.ncols(),
            levels.len()
        )));
    }
    Ok(())
}

/// `ω_r a†a + Σ ω_j|j⟩⟨j| + Σ_ij (g_ij |i⟩⟨j| a† + h.c.)` on
/// `(nmax + 1) ⊗ levels`, cavity first.
pub fn multilevel_coupling(levels: &[f64], g: &DMatrix<C64>, omega_r: f64, nmax: usize) -> Result<Operator> {
    check_levels_and_couplings(levels, g)?;
    if nmax < 1 {
        return Err(Error::InvalidArgument("Fock cutoff must be at least 1".into()));
    }
    let d = nmax + 1;
    let l = levels.len();
    let cavity = ops::number(d).scaled(c(omega_r, 0.0)).tensor(&ops::identity(l));
    let atom = ops::identity(d).tensor(&Operator::diagonal(&HilbertSpace::qudit(l), levels)?);
    let b = Operator::new(g.clone(), HilbertSpace::qudit(l))?;
    let forward = ops::create(d).tensor(&b);
    let coupling = &forward + &forward.dagger();
    Ok(&(&cavity + &atom) + &coupling)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveModel {
    /// `χ_ij = |g_ij|² / (ω_j − ω_i − ω_r)`.
    pub chi_matrix: DMatrix<f64>,
    /// `Λ_j = Σ_i χ_ij`.
    pub lamb_shifts: Vec<f64>,
    /// `χ_j = Σ_i (χ_ij − χ_ji)`, the cavity pull of level `j`.
    pub level_pulls: Vec<f64>,
    pub chi_qubit: f64,
    pub omega_r_prime: f64,
    pub omega_q_prime: f64,
}

impl DispersiveModel {
    /// Second-order energy of `|j, n⟩` relative to the bare `ω_j + nω_r`.
    pub fn level_shift(&self, j: usize, n: usize) -> f64 {
        self.lamb_shifts[j] + n as f64 * self.level_pulls[j]
    }
}

pub const DEFAULT_DISPERSIVE_FACTOR: f64 = 10.0;

/// Second-order dispersive reduction of [`multilevel_coupling`].
///
/// Every coupled pair must satisfy `|ω_j − ω_i − ω_r| ≥ factor·|g_ij|`.
pub fn schrieffer_wolff(levels: &[f64], g: &DMatrix<C64>, omega_r: f64, factor: f64) -> Result<DispersiveModel> {
    check_levels_and_couplings(levels, g)?;
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("dispersive model needs at least two levels".into()));
    }
    let l = levels.len();
    let mut chi = DMatrix::<f64>::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            let coupling = g[(i, j)].norm();
            if coupling == 0.0 {
                continue;
            }
            let detuning = levels[j] - levels[i] - omega_r;
            if !(detuning.abs() >= factor * coupling) {
                return Err(Error::NearResonant { i, j, detuning: detuning.abs(), coupling: factor * coupling, factor });
            }
            chi[(i, j)] = coupling * coupling / detuning;
        }
    }
    let lamb_shifts: Vec<f64> = (0..l).map(|j| (0..l).map(|i| chi[(i, j)]).sum()).collect();
    let level_pulls: Vec<f64> = (0..l).map(|j| (0..l).map(|i| chi[(i, j)] - chi[(j, i)]).sum()).collect();
    Ok(DispersiveModel {
        omega_r_prime: omega_r + 0.5 * (level_pulls[0] + level_pulls[1]),
        omega_q_prime: levels[1] - levels[0] + lamb_shifts[1] - lamb_shifts[0],
        chi_qubit: 0.5 * (level_pulls[1] - level_pulls[0]),
        chi_matrix: chi,
        lamb_shifts,
        level_pulls,
    })
}

/// Coupling matrix of a two-level atom in the Jaynes–Cummings pairing.
pub fn jc_coupling_matrix(g: f64) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[ZERO, c(g, 0.0), ZERO, ZERO])
}
