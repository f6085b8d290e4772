//! Markovian master equation `dρ/dt = −i[H(t),ρ] + Σ Γ_k D[L_k]ρ`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, expm, hermiticity_deviation, liouvillian, ops, trace_of_product, unvec, vec_of, Channel, DensityMatrix,
    HilbertSpace, Operator, C64, I,
};
use crate::ode::{check_grid, integrate, OdeOptions, OdeStats};

/// Periodic drive envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Drive {
    /// `amplitude · cos(omega · t + phase)`.
    Cosine {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl Drive {
    pub fn cosine(amplitude: f64, omega: f64) -> Self {
        Drive::Cosine { amplitude, omega, phase: 0.0 }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Drive::Cosine { amplitude, omega, phase } => amplitude * (omega * t + phase).cos(),
        }
    }

    pub fn period(&self) -> Option<f64> {
        match *self {
            Drive::Cosine { omega, .. } if omega != 0.0 => Some(2.0 * std::f64::consts::PI / omega.abs()),
            _ => None,
        }
    }
}

pub type HamiltonianFn = Arc<dyn Fn(f64) -> Operator + Send + Sync>;

/// Hamiltonian descriptor: static, driven by scalar envelopes, or an
/// arbitrary callable returning an operator on a fixed space.
#[derive(Clone)]
pub enum Hamiltonian {
    Static(Operator),
    Driven { h0: Operator, terms: Vec<(Operator, Drive)> },
    Custom { space: HilbertSpace, f: HamiltonianFn },
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hamiltonian::Static(h) => f.debug_tuple("Static").field(h).finish(),
            Hamiltonian::Driven { h0, terms } => f.debug_struct("Driven").field("h0", h0).field("terms", terms).finish(),
            Hamiltonian::Custom { space, .. } => f.debug_struct("Custom").field("space", space).finish_non_exhaustive(),
        }
    }
}

impl From<Operator> for Hamiltonian {
    fn from(h: Operator) -> Self {
        Hamiltonian::Static(h)
    }
}

impl Hamiltonian {
    pub fn driven(h0: Operator, terms: Vec<(Operator, Drive)>) -> Result<Self> {
        for (op, _) in &terms {
            if op.space() != h0.space() {
                return Err(Error::SpaceMismatch(format!("drive term on {} vs {}", op.space(), h0.space())));
            }
        }
        Ok(Hamiltonian::Driven { h0, terms })
    }

    pub fn custom<F>(space: HilbertSpace, f: F) -> Self
    where
        F: Fn(f64) -> Operator + Send + Sync + 'static,
    {
        Hamiltonian::Custom { space, f: Arc::new(f) }
    }

    pub fn space(&self) -> &HilbertSpace {
        match self {
            Hamiltonian::Static(h) => h.space(),
            Hamiltonian::Driven { h0, .. } => h0.space(),
            Hamiltonian::Custom { space, .. } => space,
        }
    }

    pub fn is_static(&self) -> bool {
        match self {
            Hamiltonian::Static(_) => true,
            Hamiltonian::Driven { terms, .. } => terms.is_empty(),
            Hamiltonian::Custom { .. } => false,
        }
    }

    /// `H(t)` as a matrix.
    pub fn matrix_at(&self, t: f64) -> DMatrix<C64> {
        match self {
            Hamiltonian::Static(h) => h.matrix().clone(),
            Hamiltonian::Driven { h0, terms } => {
                let mut m = h0.matrix().clone();
                for (op, drive) in terms {
                    m += op.matrix() * c(drive.value(t), 0.0);
                }
                m
            }
            Hamiltonian::Custom { f, .. } => f(t).into_matrix(),
        }
    }

    pub fn at(&self, t: f64) -> Result<Operator> {
        let m = self.matrix_at(t);
        Operator::new(m, self.space().clone())
    }

    /// Common period of all drive terms, when there is one.
    pub fn period(&self) -> Option<f64> {
        match self {
            Hamiltonian::Driven { terms, .. } => {
                let periods: Vec<f64> = terms.iter().filter_map(|(_, d)| d.period()).collect();
                let first = *periods.first()?;
                periods.iter().all(|p| (p - first).abs() <= 1e-12 * first).then_some(first)
            }
            _ => None,
        }
    }

    /// Check Hermiticity and shape at a few sample times.
    pub fn validate(&self, samples: &[f64]) -> Result<()> {
        let times: Vec<f64> = if self.is_static() { vec![0.0] } else { samples.to_vec() };
        for t in times {
            let m = self.matrix_at(t);
            if m.nrows() != self.space().total() || !m.is_square() {
                return Err(Error::SpaceMismatch(format!("H({t}) has shape {}x{}", m.nrows(), m.ncols())));
            }
            let deviation = hermiticity_deviation(&m);
            if deviation > crate::linalg::HERMITIAN_TOL {
                return Err(Error::NotHermitian { deviation });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub hamiltonian: Hamiltonian,
    pub channels: Vec<Channel>,
}

impl LindbladModel {
    pub fn new(hamiltonian: impl Into<Hamiltonian>, channels: Vec<Channel>) -> Result<Self> {
        let hamiltonian = hamiltonian.into();
        for ch in &channels {
            if ch.op.space() != hamiltonian.space() {
                return Err(Error::SpaceMismatch(format!(
                    "channel on {} vs hamiltonian on {}",
                    ch.op.space(),
                    hamiltonian.space()
                )));
            }
            if !(ch.rate >= 0.0) || !ch.rate.is_finite() {
                return Err(Error::NegativeRate { what: "lindblad channel".into(), rate: ch.rate });
            }
        }
        hamiltonian.validate(&[0.0, 0.37, 1.91])?;
        Ok(Self { hamiltonian, channels })
    }

    pub fn space(&self) -> &HilbertSpace {
        self.hamiltonian.space()
    }

    /// Generator of a time-independent model.
    pub fn liouvillian(&self) -> Result<crate::linalg::Superoperator> {
        if !self.hamiltonian.is_static() {
            return Err(Error::InvalidArgument("superoperator exponential needs a time-independent model".into()));
        }
        liouvillian(&self.hamiltonian.at(0.0)?, &self.channels)
    }

    /// `𝓛(t)ρ` evaluated on matrices.
    pub fn apply(&self, t: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let rhs = MatrixRhs::new(self);
        rhs.eval(&self.hamiltonian.matrix_at(t), rho)
    }
}

/// Precomputed pieces of the matrix-form right-hand side.
struct MatrixRhs {
    /// `−½ Σ Γ L†L`
    damping: DMatrix<C64>,
    jumps: Vec<(DMatrix<C64>, DMatrix<C64>)>,
}

impl MatrixRhs {
    fn new(model: &LindbladModel) -> Self {
        let n = model.space().total();
        let mut damping = DMatrix::zeros(n, n);
        let mut jumps = Vec::new();
        for ch in &model.channels {
            if ch.rate == 0.0 {
                continue;
            }
            let l = ch.collapse().into_matrix();
            let ld = l.adjoint();
            damping -= (&ld * &l) * c(0.5, 0.0);
            jumps.push((l, ld));
        }
        Self { damping, jumps }
    }

    fn eval(&self, h: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
        // −i H_eff ρ + i ρ H_eff† with H_eff = H + i·damping
        let a = h * (-I) + &self.damping;
        let mut out = &a * rho + rho * a.adjoint();
        for (l, ld) in &self.jumps {
            out += l * rho * ld;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Adaptive Dormand–Prince on the matrix form.
    #[default]
    AdaptiveRk,
    /// `exp(𝓛 Δt)` between grid points; time-independent models only.
    Exponential,
}

/// What to do when the minimum eigenvalue of the state dips below a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositivityPolicy {
    Abort(f64),
    Report,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub method: Method,
    pub ode: OdeOptions,
    pub positivity: PositivityPolicy,
    pub store_states: bool,
    /// Named observables recorded at every grid point.
    pub observables: Vec<(String, Operator)>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: Method::AdaptiveRk,
            ode: OdeOptions::default(),
            positivity: PositivityPolicy::Abort(-1e-7),
            store_states: true,
            observables: Vec::new(),
        }
    }
}

impl SolverOptions {
    pub fn with_observables(observables: Vec<(String, Operator)>) -> Self {
        Self { observables, ..Self::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Largest `|Tr ρ(t) − Tr ρ(0)|` over the grid.
    pub max_trace_drift: f64,
    /// Smallest eigenvalue seen on the grid.
    pub min_eigenvalue: f64,
    /// Largest `|ρ − ρ†|` entry seen on the grid.
    pub max_hermiticity_error: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    /// Solver-specific quantities.
    pub extra: Vec<(String, f64)>,
}

impl Diagnostics {
    fn absorb(&mut self, stats: OdeStats) {
        self.accepted_steps += stats.accepted;
        self.rejected_steps += stats.rejected;
        self.rhs_evals += stats.rhs_evals;
    }

    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub name: String,
    pub values: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    /// States on the grid; empty when storage was disabled.
    pub states: Vec<DensityMatrix>,
    pub expectations: Vec<ObservableSeries>,
    pub diagnostics: Diagnostics,
}

impl EvolutionResult {
    pub fn expectation(&self, name: &str) -> Option<&[C64]> {
        self.expectations.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }

    /// Real parts of a named observable.
    pub fn real_series(&self, name: &str) -> Option<Vec<f64>> {
        self.expectation(name).map(|v| v.iter().map(|z| z.re).collect())
    }

    pub fn population(&self, level: usize) -> Vec<f64> {
        self.states.iter().map(|r| r.population(level)).collect()
    }
}

/// Accumulates states, observables and invariants on the output grid.
pub(crate) struct Recorder<'a> {
    observables: &'a [(String, Operator)],
    store: bool,
    space: HilbertSpace,
    trace0: C64,
    pub states: Vec<DensityMatrix>,
    pub values: Vec<Vec<C64>>,
    pub diagnostics: Diagnostics,
}

impl<'a> Recorder<'a> {
    pub fn new(observables: &'a [(String, Operator)], store: bool, space: HilbertSpace, trace0: C64) -> Result<Self> {
        for (name, op) in observables {
            if op.space() != &space {
                return Err(Error::SpaceMismatch(format!("observable {name} on {} vs {space}", op.space())));
            }
        }
        Ok(Self {
            observables,
            store,
            space,
            trace0,
            states: Vec::new(),
            values: vec![Vec::new(); observables.len()],
            diagnostics: Diagnostics { min_eigenvalue: f64::INFINITY, ..Diagnostics::default() },
        })
    }

    pub fn record(&mut self, t: f64, rho: DMatrix<C64>, policy: PositivityPolicy) -> Result<()> {
        let drift = (rho.trace() - self.trace0).norm();
        let herm = hermiticity_deviation(&rho);
        let state = DensityMatrix::from_parts_unchecked(rho, self.space.clone());
        let min_eig = state.min_eigenvalue();
        let d = &mut self.diagnostics;
        d.max_trace_drift = d.max_trace_drift.max(drift);
        d.max_hermiticity_error = d.max_hermiticity_error.max(herm);
        d.min_eigenvalue = d.min_eigenvalue.min(min_eig);
        if let PositivityPolicy::Abort(bound) = policy {
            if min_eig < bound {
                return Err(Error::InvariantViolation(format!(
                    "minimum eigenvalue {min_eig:.3e} below {bound:.1e} at t = {t} \
                     (trace drift {:.3e}, accepted steps {}); tighten the integrator tolerances",
                    d.max_trace_drift, d.accepted_steps
                )));
            }
        }
        for (k, (_, op)) in self.observables.iter().enumerate() {
            self.values[k].push(trace_of_product(op.matrix(), state.matrix()));
        }
        if self.store {
            self.states.push(state);
        }
        Ok(())
    }

    pub fn finish(self, times: Vec<f64>) -> EvolutionResult {
        let expectations = self
            .observables
            .iter()
            .zip(self.values)
            .map(|((name, _), values)| ObservableSeries { name: name.clone(), values })
            .collect();
        let mut diagnostics = self.diagnostics;
        if !diagnostics.min_eigenvalue.is_finite() {
            diagnostics.min_eigenvalue = 0.0;
        }
        EvolutionResult { times, states: self.states, expectations, diagnostics }
    }
}

fn symmetrize(y: &mut DVector<C64>, n: usize) {
    for j in 0..n {
        for i in 0..j {
            let a = y[i + n * j];
            let b = y[j + n * i];
            let avg = (a + b.conj()) * 0.5;
            y[i + n * j] = avg;
            y[j + n * i] = avg.conj();
        }
        let d = &mut y[j + n * j];
        *d = c(d.re, 0.0);
    }
}

/// Integrate a linear matrix ODE `dρ/dt = f(t, ρ)` with symmetrization
/// after each accepted step and invariant monitoring on the grid.
pub(crate) fn evolve_density<F>(
    rhs: F,
    rho0: &DensityMatrix,
    grid: &[f64],
    opts: &SolverOptions,
    symmetrize_steps: bool,
) -> Result<EvolutionResult>
where
    F: Fn(f64, &DMatrix<C64>) -> DMatrix<C64>,
{
    evolve_density_mapped(rhs, rho0.matrix(), rho0.space(), grid, opts, symmetrize_steps, |_, m| m)
}

/// As [`evolve_density`], for a state integrated in another frame. `map`
/// takes the internal state at time `t` to the reported one.
pub(crate) fn evolve_density_mapped<F, M>(
    rhs: F,
    y0: &DMatrix<C64>,
    space: &HilbertSpace,
    grid: &[f64],
    opts: &SolverOptions,
    symmetrize_steps: bool,
    map: M,
) -> Result<EvolutionResult>
where
    F: Fn(f64, &DMatrix<C64>) -> DMatrix<C64>,
    M: Fn(f64, DMatrix<C64>) -> DMatrix<C64>,
{
    check_grid(grid)?;
    let n = y0.nrows();
    let first = map(grid[0], y0.clone());
    let mut rec = Recorder::new(&opts.observables, opts.store_states, space.clone(), first.trace())?;
    let vrhs = |t: f64, y: &DVector<C64>| vec_of(&rhs(t, &unvec(y, n)));
    let sol = integrate(vrhs, vec_of(y0), grid, opts.ode, |_, y| {
        if symmetrize_steps {
            symmetrize(y, n);
        }
        Ok(())
    })?;
    rec.diagnostics.absorb(sol.stats);
    for (t, y) in sol.times.iter().zip(&sol.states) {
        rec.record(*t, map(*t, unvec(y, n)), opts.positivity)?;
    }
    Ok(rec.finish(sol.times))
}

/// Propagate with `exp(𝓛 Δt)` between grid points.
pub(crate) fn evolve_exponential(
    generator: &DMatrix<C64>,
    rho0: &DensityMatrix,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<EvolutionResult> {
    check_grid(grid)?;
    let n = rho0.dim();
    let mut rec = Recorder::new(&opts.observables, opts.store_states, rho0.space().clone(), rho0.trace())?;
    let mut v = vec_of(rho0.matrix());
    rec.record(grid[0], rho0.matrix().clone(), opts.positivity)?;
    let mut cached: Option<(f64, DMatrix<C64>)> = None;
    for w in grid.windows(2) {
        let dt = w[1] - w[0];
        let reuse = matches!(&cached, Some((h, _)) if (h - dt).abs() <= 1e-13 * dt.abs());
        if !reuse {
            cached = Some((dt, expm(&(generator * c(dt, 0.0)))));
        }
        let prop = &cached.as_ref().unwrap().1;
        v = prop * v;
        rec.record(w[1], unvec(&v, n), opts.positivity)?;
    }
    Ok(rec.finish(grid.to_vec()))
}

pub fn solve_lindblad(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<EvolutionResult> {
    if rho0.space() != model.space() {
        return Err(Error::SpaceMismatch(format!("initial state on {} vs model on {}", rho0.space(), model.space())));
    }
    match opts.method {
        Method::Exponential => {
            let l = model.liouvillian()?;
            evolve_exponential(l.matrix(), rho0, grid, opts)
        }
        Method::AdaptiveRk => {
            let rhs = MatrixRhs::new(model);
            if model.hamiltonian.is_static() {
                let h = model.hamiltonian.matrix_at(0.0);
                evolve_density(|_, rho| rhs.eval(&h, rho), rho0, grid, opts, true)
            } else {
                let ham = &model.hamiltonian;
                evolve_density(|t, rho| rhs.eval(&ham.matrix_at(t), rho), rho0, grid, opts, true)
            }
        }
    }
}

/// Relaxation `√Γ1 σ−` and pure dephasing `√(Γφ/2) σz`, so that coherences
/// decay at `Γφ + Γ1/2`.
pub fn qubit_channels(gamma1: f64, gamma_phi: f64) -> Result<Vec<Channel>> {
    Ok(vec![
        Channel::new(ops::sigma_minus(), gamma1)
            .map_err(|_| Error::NegativeRate { what: "relaxation".into(), rate: gamma1 })?,
        Channel::new(ops::sigma_z(), gamma_phi / 2.0)
            .map_err(|_| Error::NegativeRate { what: "pure dephasing".into(), rate: gamma_phi })?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceTimes {
    pub gamma1: f64,
    pub gamma_phi: f64,
    pub gamma2: f64,
    pub t1: f64,
    pub t2: f64,
    /// Both rates vanish; T1 and T2 are infinite.
    pub infinite: bool,
}

pub fn decoherence_times(gamma1: f64, gamma_phi: f64) -> Result<DecoherenceTimes> {
    if !(gamma1 >= 0.0) {
        return Err(Error::NegativeRate { what: "relaxation".into(), rate: gamma1 });
    }
    if !(gamma_phi >= 0.0) {
        return Err(Error::NegativeRate { what: "pure dephasing".into(), rate: gamma_phi });
    }
    let gamma2 = gamma_phi + gamma1 / 2.0;
    let inv = |g: f64| if g > 0.0 { 1.0 / g } else { f64::INFINITY };
    Ok(DecoherenceTimes {
        gamma1,
        gamma_phi,
        gamma2,
        t1: inv(gamma1),
        t2: inv(gamma2),
        infinite: gamma1 == 0.0 && gamma_phi == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dissipator, Ket};
    use crate::ode::linspace;
    use approx::assert_abs_diff_eq;

    fn excited() -> DensityMatrix {
        DensityMatrix::basis(&HilbertSpace::qubit(), 1)
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::from_ket(&Ket::plus()).unwrap()
    }

    fn zero_h() -> Operator {
        Operator::zeros(&HilbertSpace::qubit())
    }

    #[test]
    fn zero_rates_give_zero_weight_channels() {
        let ch = qubit_channels(0.0, 0.0).unwrap();
        assert_eq!(ch.len(), 2);
        assert!(ch.iter().all(|c| c.rate == 0.0));
        assert!(qubit_channels(-1.0, 0.0).is_err());
        assert!(qubit_channels(0.0, -1.0).is_err());
    }

    #[test]
    fn amplitude_damping_matches_exponential() {
        let model = LindbladModel::new(zero_h(), qubit_channels(1.0, 0.0).unwrap()).unwrap();
        let grid = linspace(0.0, 5.0, 101);
        let res = solve_lindblad(&model, &excited(), &grid, &SolverOptions::default()).unwrap();
        for (t, rho) in grid.iter().zip(&res.states) {
            assert!((rho.population(1) - (-t).exp()).abs() < 1e-6);
        }
        assert!(res.diagnostics.max_trace_drift < 1e-8);
    }

    #[test]
    fn pure_dephasing_coherence() {
        let gphi = 0.8;
        let model = LindbladModel::new(zero_h(), qubit_channels(0.0, gphi).unwrap()).unwrap();
        let grid = linspace(0.0, 3.0, 31);
        let res = solve_lindblad(&model, &plus(), &grid, &SolverOptions::default()).unwrap();
        for (t, rho) in grid.iter().zip(&res.states) {
            assert!((rho.matrix()[(0, 1)].norm() - 0.5 * (-gphi * t).exp()).abs() < 1e-7);
        }
    }

    #[test]
    fn unitary_limit_keeps_purity_and_precesses() {
        let omega = 2.0;
        let h = ops::sigma_z().scaled(c(omega / 2.0, 0.0));
        let model = LindbladModel::new(h, vec![]).unwrap();
        let grid = linspace(0.0, 4.0, 81);
        let opts = SolverOptions::with_observables(vec![("sx".into(), ops::sigma_x())]);
        let res = solve_lindblad(&model, &plus(), &grid, &opts).unwrap();
        let sx = res.real_series("sx").unwrap();
        for ((t, rho), x) in grid.iter().zip(&res.states).zip(&sx) {
            assert!((rho.purity() - 1.0).abs() < 1e-7);
            assert!((x - (omega * t).cos()).abs() < 1e-6);
        }
    }

    #[test]
    fn rk_agrees_with_superoperator_exponential() {
        let h = &ops::sigma_x().scaled(c(0.7, 0.0)) + &ops::sigma_z().scaled(c(0.3, 0.0));
        let model = LindbladModel::new(h, qubit_channels(0.4, 0.25).unwrap()).unwrap();
        let grid = linspace(0.0, 6.0, 61);
        let rk = solve_lindblad(&model, &excited(), &grid, &SolverOptions::default()).unwrap();
        let ex = solve_lindblad(
            &model,
            &excited(),
            &grid,
            &SolverOptions { method: Method::Exponential, ..SolverOptions::default() },
        )
        .unwrap();
        for (a, b) in rk.states.iter().zip(&ex.states) {
            let diff = (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-8, "{diff}");
        }
    }

    #[test]
    fn maximally_mixed_is_fixed_point_of_dephasing() {
        let model = LindbladModel::new(zero_h(), vec![Channel::new(ops::sigma_z(), 3.0).unwrap()]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(&HilbertSpace::qubit());
        let out = model.apply(0.0, mixed.matrix());
        assert!(out.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn matrix_rhs_matches_direct_formula() {
        let h = &ops::sigma_x().scaled(c(0.7, 0.0)) + &ops::sigma_y().scaled(c(-0.2, 0.0));
        let chans = vec![Channel::new(ops::sigma_minus(), 0.9).unwrap(), Channel::new(ops::sigma_z(), 0.3).unwrap()];
        let model = LindbladModel::new(h.clone(), chans.clone()).unwrap();
        let rho = DensityMatrix::from_ket(&Ket::from_amplitudes(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap()).unwrap();
        let r = rho.matrix();
        let mut direct = (h.matrix() * r - r * h.matrix()) * (-I);
        for ch in &chans {
            direct += dissipator(ch.op.matrix(), r) * c(ch.rate, 0.0);
        }
        let got = model.apply(0.0, r);
        assert!((got - direct).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn driven_hamiltonian_and_errors() {
        let h0 = ops::sigma_z().scaled(c(0.5, 0.0));
        let ham = Hamiltonian::driven(h0.clone(), vec![(ops::sigma_x(), Drive::cosine(0.2, 1.0))]).unwrap();
        assert!(!ham.is_static());
        assert_abs_diff_eq!(ham.period().unwrap(), 2.0 * std::f64::consts::PI, epsilon = 1e-15);
        assert!(Hamiltonian::driven(h0.clone(), vec![(ops::identity(3), Drive::cosine(1.0, 1.0))]).is_err());
        let bad = LindbladModel::new(ops::sigma_minus(), vec![]);
        assert!(matches!(bad, Err(Error::NotHermitian { .. })));
        let model = LindbladModel::new(ham, vec![]).unwrap();
        assert!(solve_lindblad(&model, &excited(), &[0.0, 1.0], &SolverOptions { method: Method::Exponential, ..SolverOptions::default() }).is_err());
        let wrong = DensityMatrix::maximally_mixed(&HilbertSpace::qudit(3));
        assert!(solve_lindblad(&model, &wrong, &[0.0, 1.0], &SolverOptions::default()).is_err());
        assert!(solve_lindblad(&model, &excited(), &[1.0, 0.0], &SolverOptions::default()).is_err());
    }

    #[test]
    fn decoherence_time_algebra() {
        let d = decoherence_times(2.0, 0.5).unwrap();
        assert_abs_diff_eq!(d.gamma2, 1.5);
        assert_abs_diff_eq!(d.t2, 2.0 / 3.0, epsilon = 1e-15);
        let d = decoherence_times(0.8, 0.0).unwrap();
        assert_abs_diff_eq!(d.t2, 2.0 * d.t1, epsilon = 1e-12);
        let d = decoherence_times(0.0, 0.3).unwrap();
        assert_eq!(d.gamma2, 0.3);
        let d = decoherence_times(0.0, 0.0).unwrap();
        assert!(d.infinite && d.t1.is_infinite() && d.t2.is_infinite());
        assert!(decoherence_times(-1.0, 0.0).is_err());
    }
}
