//! Stochastic Schrödinger and master equations.
//!
//! The linear Markovian SSE is driven by complex Wiener increments with
//! `E[dW dW*] = h`, `E[dW dW] = 0`. Continuous σz measurement uses real
//! increments and produces a homodyne record `Ṽ = ⟨σz⟩ + dW/(√(4k) h)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, ops, DensityMatrix, HilbertSpace, Ket, Operator, C64, I, ONE, ZERO};
use crate::ode::check_grid;
use crate::rng::{standard_normal, stream, Stream};

/// Pre-drawn Wiener increments on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    pub h: f64,
    /// `increments[step][channel]`.
    pub increments: Vec<Vec<C64>>,
    pub complex: bool,
    pub master_seed: u64,
    pub index: u64,
}

impl WienerPath {
    /// Real increments have variance `h`; complex ones have independent
    /// real and imaginary parts of variance `h/2`.
    pub fn generate(steps: usize, channels: usize, h: f64, complex: bool, master_seed: u64, index: u64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("Wiener step must be positive, got {h}")));
        }
        let mut rng = stream(master_seed, index);
        let increments = (0..steps).map(|_| (0..channels).map(|_| draw(&mut rng, h, complex)).collect()).collect();
        Ok(Self { h, increments, complex, master_seed, index })
    }

    pub fn steps(&self) -> usize {
        self.increments.len()
    }

    pub fn channels(&self) -> usize {
        self.increments.first().map_or(0, Vec::len)
    }

    /// The same Brownian path sampled `factor` times more coarsely.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.steps() % factor != 0 {
            return Err(Error::InvalidArgument(format!("cannot coarsen {} steps by {factor}", self.steps())));
        }
        let increments = self
            .increments
            .chunks(factor)
            .map(|chunk| {
                let mut acc = vec![ZERO; self.channels()];
                for step in chunk {
                    for (a, d) in acc.iter_mut().zip(step) {
                        *a += d;
                    }
                }
                acc
            })
            .collect();
        Ok(Self { h: self.h * factor as f64, increments, ..self.clone() })
    }

    fn check(&self, grid: &[f64], channels: usize, complex: bool) -> Result<()> {
        if self.complex != complex {
            let want = if complex { "complex" } else { "real" };
            return Err(Error::InvalidArgument(format!("this equation needs {want} Wiener increments")));
        }
        if self.steps() != grid.len() - 1 {
            return Err(Error::InvalidArgument(format!("path has {} steps, grid has {}", self.steps(), grid.len() - 1)));
        }
        if self.steps() > 0 && self.channels() != channels {
            return Err(Error::InvalidArgument(format!("path has {} channels, model has {channels}", self.channels())));
        }
        check_uniform(grid, self.h)
    }
}

fn draw(rng: &mut Stream, h: f64, complex: bool) -> C64 {
    if complex {
        let s = (0.5 * h).sqrt();
        c(s * standard_normal(rng), s * standard_normal(rng))
    } else {
        c(h.sqrt() * standard_normal(rng), 0.0)
    }
}

fn check_uniform(grid: &[f64], h: f64) -> Result<()> {
    check_grid(grid)?;
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1e-3 * w[1].abs()) {
            return Err(Error::InvalidArgument(format!("grid step {} does not match the Wiener step {h}", w[1] - w[0])));
        }
    }
    Ok(())
}

/// Uniform grid with step `h` and `steps` intervals.
pub fn uniform_grid(h: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| k as f64 * h).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    EulerMaruyama,
    Heun,
}

/// Unnormalized states of the linear SSE.
#[derive(Debug, Clone)]
pub struct SseTrajectory {
    pub times: Vec<f64>,
    pub kets: Vec<Ket>,
}

impl SseTrajectory {
    pub fn norms_sq(&self) -> Vec<f64> {
        self.kets.iter().map(|k| k.amplitudes().norm_squared()).collect()
    }
}

/// Largest `h · λ_max(ΣS†S)` accepted by the linear SSE.
const MAX_LOSS_STEP: f64 = 0.5;

/// Linear SSE `dφ = [−iH − ½ΣS†S] φ dt + Σ S_α φ dW_α`.
pub fn solve_sse_markov(
    h: &Operator,
    channels: &[Operator],
    psi0: &Ket,
    grid: &[f64],
    scheme: Scheme,
    path: &WienerPath,
) -> Result<SseTrajectory> {
    h.ensure_hermitian()?;
    for s in channels {
        if s.space() != h.space() {
            return Err(Error::SpaceMismatch(format!("channel on {} vs hamiltonian on {}", s.space(), h.space())));
        }
    }
    if psi0.space() != h.space() {
        return Err(Error::SpaceMismatch(format!("ket on {} vs hamiltonian on {}", psi0.space(), h.space())));
    }
    path.check(grid, channels.len(), true)?;
    let n = h.dim();
    let mut loss = DMatrix::<C64>::zeros(n, n);
    for s in channels {
        loss += s.matrix().adjoint() * s.matrix();
    }
    let lmax = eigh(&loss).0.last().copied().unwrap_or(0.0);
    if path.h * lmax > MAX_LOSS_STEP {
        return Err(Error::StepTooLarge(format!(
            "h·λmax(ΣS†S) = {:.3} exceeds {MAX_LOSS_STEP}; use a step below {:.3e}",
            path.h * lmax,
            MAX_LOSS_STEP / lmax
        )));
    }
    let drift = h.matrix() * -I - loss * c(0.5, 0.0);
    let dt = c(path.h, 0.0);
    let noise = |phi: &DVector<C64>, dw: &[C64]| {
        let mut out = DVector::<C64>::zeros(n);
        for (s, w) in channels.iter().zip(dw) {
            out += (s.matrix() * phi) * *w;
        }
        out
    };
    let mut phi = psi0.amplitudes().clone();
    let mut kets = Vec::with_capacity(grid.len());
    kets.push(psi0.clone());
    for dw in &path.increments {
        let a0 = &drift * &phi;
        let b0 = noise(&phi, dw);
        phi = match scheme {
            Scheme::EulerMaruyama => &phi + a0 * dt + b0,
            Scheme::Heun => {
                let pred = &phi + &a0 * dt + &b0;
                let a1 = &drift * &pred;
                let b1 = noise(&pred, dw);
                &phi + (a0 + a1) * (dt * 0.5) + (b0 + b1) * c(0.5, 0.0)
            }
        };
        kets.push(Ket::from_parts_unchecked(phi.clone(), psi0.space().clone()));
    }
    Ok(SseTrajectory { times: grid.to_vec(), kets })
}

/// Averages over linear-SSE paths.
#[derive(Debug, Clone)]
pub struct SseEnsemble {
    pub times: Vec<f64>,
    /// Mean of `|φ⟩⟨φ|`.
    pub states: Vec<DensityMatrix>,
    pub mean_norm_sq: Vec<f64>,
    pub norm_sq_std_error: Vec<f64>,
    pub paths: usize,
}

/// Run `n_paths` independent evaluations in parallel, returned in index
/// order so reductions do not depend on scheduling.
pub fn par_paths<T, F>(n_paths: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    (0..n_paths as u64).into_par_iter().map(&f).collect()
}

pub fn sse_markov_ensemble(
    h: &Operator,
    channels: &[Operator],
    psi0: &Ket,
    grid: &[f64],
    scheme: Scheme,
    n_paths: usize,
    master_seed: u64,
) -> Result<SseEnsemble> {
    if n_paths == 0 {
        return Err(Error::InvalidArgument("at least one path is required".into()));
    }
    check_grid(grid)?;
    let steps = grid.len() - 1;
    let dt = if steps > 0 { grid[1] - grid[0] } else { 1.0 };
    let trajs = par_paths(n_paths, |i| {
        let path = WienerPath::generate(steps, channels.len(), dt, true, master_seed, i)?;
        solve_sse_markov(h, channels, psi0, grid, scheme, &path)
    })?;
    let n = h.dim();
    let nf = n_paths as f64;
    let mut sums = vec![DMatrix::<C64>::zeros(n, n); grid.len()];
    let mut norm = vec![0.0; grid.len()];
    let mut norm2 = vec![0.0; grid.len()];
    for tr in &trajs {
        for (i, k) in tr.kets.iter().enumerate() {
            let a = k.amplitudes();
            sums[i] += a * a.adjoint();
            let p = a.norm_squared();
            norm[i] += p;
            norm2[i] += p * p;
        }
    }
    let states = sums.into_iter().map(|m| DensityMatrix::from_parts_unchecked(m.unscale(nf), h.space().clone())).collect();
    let mean_norm_sq: Vec<f64> = norm.iter().map(|s| s / nf).collect();
    let norm_sq_std_error = norm
        .iter()
        .zip(&norm2)
        .map(|(s, q)| {
            if n_paths < 2 {
                return 0.0;
            }
            let m = s / nf;
            (((q - nf * m * m) / (nf - 1.0)).max(0.0) / nf).sqrt()
        })
        .collect();
    Ok(SseEnsemble { times: grid.to_vec(), states, mean_norm_sq, norm_sq_std_error, paths: n_paths })
}

/// Homodyne record, one value per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    /// Start of each integration interval.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub k: f64,
}

/// `⟨σz⟩ + dW/(√(4k) dt)` for a given increment.
pub fn signal_from_increment(expect_sz: f64, k: f64, dt: f64, dw: f64) -> f64 {
    expect_sz + dw / ((4.0 * k).sqrt() * dt)
}

/// Gaussian sample with mean `⟨σz⟩` and variance `1/(4k dt)`.
pub fn measurement_signal(expect_sz: f64, k: f64, dt: f64, rng: &mut Stream) -> Result<f64> {
    if !(k > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("measurement needs k > 0 and dt > 0, got k = {k}, dt = {dt}")));
    }
    let dw = dt.sqrt() * standard_normal(rng);
    Ok(signal_from_increment(expect_sz, k, dt, dw))
}

/// Recommended step for measurement strength `k`.
pub fn recommended_step(k: f64) -> f64 {
    0.01 / k
}

fn check_strength(k: f64, h: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("measurement strength must be positive, got {k}")));
    }
    if k * h > 0.01 * (1.0 + 1e-9) {
        log::warn!("k·h = {:.3e} exceeds 0.01; the Euler–Maruyama step may be inaccurate", k * h);
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MeasuredTrajectory {
    pub times: Vec<f64>,
    pub kets: Vec<Ket>,
    pub record: MeasurementRecord,
    /// Largest `|‖ψ‖² − 1|` removed by the per-step renormalization.
    pub max_renormalization: f64,
}

impl MeasuredTrajectory {
    pub fn expect_sz(&self) -> Vec<f64> {
        self.kets.iter().map(|k| sz_of_ket(k.amplitudes())).collect()
    }
}

fn sz_of_ket(a: &DVector<C64>) -> f64 {
    (a[1].norm_sqr() - a[0].norm_sqr()) / a.norm_squared()
}

/// Drift and diffusion increments of the normalized σz-measurement SSE
/// for a unit ket, before renormalization.
pub fn sse_z_increment(k: f64, psi: &DVector<C64>, dt: f64, dw: f64) -> DVector<C64> {
    let z = sz_of_ket(psi);
    // (σz − ⟨σz⟩) is diagonal: entries (−1 − z, 1 − z).
    let d = [-1.0 - z, 1.0 - z];
    DVector::from_iterator(2, (0..2).map(|i| psi[i] * (-0.5 * k * d[i] * d[i] * dt + k.sqrt() * d[i] * dw)))
}

/// Continuous σz measurement of a qubit ket (Euler–Maruyama with
/// per-step renormalization).
pub fn solve_sse_z(k: f64, psi0: &Ket, grid: &[f64], path: &WienerPath) -> Result<MeasuredTrajectory> {
    if psi0.space() != &HilbertSpace::qubit() {
        return Err(Error::SpaceMismatch(format!("σz measurement needs a qubit, got {}", psi0.space())));
    }
    if (psi0.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!("initial ket must be normalized, norm = {}", psi0.norm())));
    }
    path.check(grid, 1, false)?;
    check_strength(k, path.h)?;
    let mut psi = psi0.amplitudes().clone();
    let mut kets = vec![psi0.clone()];
    let mut values = Vec::with_capacity(path.steps());
    let mut worst = 0.0f64;
    for step in &path.increments {
        let dw = step[0].re;
        values.push(signal_from_increment(sz_of_ket(&psi), k, path.h, dw));
        psi += sse_z_increment(k, &psi, path.h, dw);
        let n2 = psi.norm_squared();
        worst = worst.max((n2 - 1.0).abs());
        psi.unscale_mut(n2.sqrt());
        kets.push(Ket::from_parts_unchecked(psi.clone(), psi0.space().clone()));
    }
    let record = MeasurementRecord { times: grid[..grid.len() - 1].to_vec(), values, k };
    Ok(MeasuredTrajectory { times: grid.to_vec(), kets, record, max_renormalization: worst })
}

/// Discretization of the σz-measurement SME.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmeScheme {
    /// `ρ ↦ MρM†/Tr(MρM†)` with `M = I − (k/2)B²h + √k B dW`,
    /// `B = σz − ⟨σz⟩`. Positive by construction and Itô-consistent with
    /// the SME to first order.
    #[default]
    Kraus,
    /// Direct Euler–Maruyama update of the SME.
    EulerMaruyama,
}

#[derive(Debug, Clone)]
pub struct MeasuredDensity {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub record: MeasurementRecord,
    pub min_eigenvalue: f64,
    pub max_trace_drift: f64,
}

impl MeasuredDensity {
    pub fn purity(&self) -> Vec<f64> {
        self.states.iter().map(DensityMatrix::purity).collect()
    }

    pub fn coherence(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.matrix()[(0, 1)].norm()).collect()
    }
}

/// Positivity floor below which the SME run aborts.
pub const SME_POSITIVITY_FLOOR: f64 = -1e-6;

fn sz_of(rho: &DMatrix<C64>) -> f64 {
    rho[(1, 1)].re - rho[(0, 0)].re
}

/// `G(ρ) = √k (σzρ + ρσz − 2⟨σz⟩ρ)`.
fn diffusion(k: f64, rho: &DMatrix<C64>, sz: &DMatrix<C64>) -> DMatrix<C64> {
    (sz * rho + rho * sz - rho * c(2.0 * sz_of(rho), 0.0)) * c(k.sqrt(), 0.0)
}

/// Drift `−(k/2)[σz,[σz,ρ]]`.
fn sme_drift(k: f64, rho: &DMatrix<C64>, sz: &DMatrix<C64>) -> DMatrix<C64> {
    let inner = sz * rho - rho * sz;
    (sz * &inner - inner * sz) * c(-0.5 * k, 0.0)
}

/// Continuous σz measurement of a qubit density matrix.
pub fn solve_sme_z(k: f64, rho0: &DensityMatrix, grid: &[f64], path: &WienerPath, scheme: SmeScheme) -> Result<MeasuredDensity> {
    if rho0.space() != &HilbertSpace::qubit() {
        return Err(Error::SpaceMismatch(format!("σz measurement needs a qubit, got {}", rho0.space())));
    }
    path.check(grid, 1, false)?;
    check_strength(k, path.h)?;
    let sz = ops::sigma_z().into_matrix();
    let mut rho = rho0.matrix().clone();
    let mut states = vec![rho0.clone()];
    let mut values = Vec::with_capacity(path.steps());
    let mut min_eig = rho0.min_eigenvalue();
    let mut drift_max = 0.0f64;
    let dt = path.h;
    for (n, step) in path.increments.iter().enumerate() {
        let dw = step[0].re;
        values.push(signal_from_increment(sz_of(&rho), k, dt, dw));
        let next = match scheme {
            SmeScheme::Kraus => {
                let z = sz_of(&rho);
                let m = DMatrix::from_diagonal(&DVector::from_iterator(
                    2,
                    [-1.0 - z, 1.0 - z].iter().map(|b| c(1.0 - 0.5 * k * b * b * dt + k.sqrt() * b * dw, 0.0)),
                ));
                let out = &m * &rho * m.adjoint();
                let tr = out.trace();
                out / tr
            }
            SmeScheme::EulerMaruyama => &rho + sme_drift(k, &rho, &sz) * c(dt, 0.0) + diffusion(k, &rho, &sz) * c(dw, 0.0),
        };
        // Restore exact Hermiticity lost to rounding.
        rho = (&next + next.adjoint()) * c(0.5, 0.0);
        let state = DensityMatrix::from_parts_unchecked(rho.clone(), rho0.space().clone());
        let lam = state.min_eigenvalue();
        min_eig = min_eig.min(lam);
        drift_max = drift_max.max((rho.trace() - ONE).norm());
        if lam < SME_POSITIVITY_FLOOR {
            return Err(Error::InvariantViolation(format!(
                "SME state lost positivity (eigenvalue {lam:.3e}) at t = {}; reduce the step below {:.3e} (k·h = {:.3e})",
                grid[n + 1],
                0.5 * dt,
                k * dt
            )));
        }
        states.push(state);
    }
    let record = MeasurementRecord { times: grid[..grid.len() - 1].to_vec(), values, k };
    Ok(MeasuredDensity { times: grid.to_vec(), states, record, min_eigenvalue: min_eig, max_trace_drift: drift_max })
}
