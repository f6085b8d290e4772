//! Post-Markovian master equation
//!
//! ```text
//! dρ/dt = L0 ρ(t) + L1 ∫₀ᵗ K(s) e^{(L0+L1)s} ρ(t − s) ds
//! ```
//!
//! integrated on a uniform grid with a Heun predictor–corrector and a
//! trapezoidal memory convolution over the stored history.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{EvolutionResult, PositivityPolicy, Recorder, SolverOptions};
use crate::linalg::{c, expm, ops, unvec, vec_of, DensityMatrix, Superoperator, C64};
use crate::ode::check_grid;

/// Memory kernel `K(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Kernel {
    /// `e^{−γt}`.
    Exponential { gamma: f64 },
    /// `γ e^{−γt}`, unit area.
    NormalizedExponential { gamma: f64 },
    /// Linear interpolation of samples; zero past the last time.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::Exponential { gamma } | Kernel::NormalizedExponential { gamma } => {
                if !(*gamma > 0.0) || !gamma.is_finite() {
                    return Err(Error::InvalidArgument(format!("kernel decay rate must be positive, got {gamma}")));
                }
            }
            Kernel::Tabulated { times, values } => {
                if times.len() < 2 || times.len() != values.len() {
                    return Err(Error::InvalidArgument("tabulated kernel needs at least two (time, value) pairs".into()));
                }
                if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidArgument("tabulated kernel times must start at 0 and increase".into()));
                }
                if values.iter().chain(times).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("tabulated kernel has non-finite entries".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Kernel::Exponential { gamma } => (-gamma * t).exp(),
            Kernel::NormalizedExponential { gamma } => gamma * (-gamma * t).exp(),
            Kernel::Tabulated { times, values } => {
                if t < 0.0 || t > *times.last().unwrap() {
                    return 0.0;
                }
                let k = times.partition_point(|x| *x <= t).clamp(1, times.len() - 1);
                let (t0, t1) = (times[k - 1], times[k]);
                let s = (t - t0) / (t1 - t0);
                values[k - 1] + s * (values[k] - values[k - 1])
            }
        }
    }

    /// Time beyond which the kernel is negligible (or exactly zero).
    fn support(&self) -> f64 {
        match self {
            // e^{−40} ≈ 4e-18
            Kernel::Exponential { gamma } | Kernel::NormalizedExponential { gamma } => 40.0 / gamma,
            Kernel::Tabulated { times, .. } => *times.last().unwrap(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PMMEModel {
    pub l0: Superoperator,
    pub l1: Superoperator,
    pub kernel: Kernel,
}

impl PMMEModel {
    pub fn new(l0: Superoperator, l1: Superoperator, kernel: Kernel) -> Result<Self> {
        if l0.space() != l1.space() {
            return Err(Error::SpaceMismatch(format!("L0 on {} vs L1 on {}", l0.space(), l1.space())));
        }
        kernel.validate()?;
        for (name, l) in [("L0", &l0), ("L1", &l1)] {
            let scale = l.matrix().norm().max(1.0);
            let err = l.trace_annihilation_error();
            if err > 1e-12 * scale {
                return Err(Error::InvalidArgument(format!("{name} does not annihilate the trace (error {err:.3e})")));
            }
        }
        Ok(Self { l0, l1, kernel })
    }

    /// `L0 + L1`, the Markovian limit for a unit-area kernel.
    pub fn combined(&self) -> Superoperator {
        self.l0.try_add(&self.l1).expect("spaces checked on construction")
    }
}

/// `L1 ρ = γ_z (σz ρ σz − ρ)` on a qubit.
pub fn nonmarkov_dephasing(gamma_z: f64) -> Result<Superoperator> {
    if !(gamma_z >= 0.0) || !gamma_z.is_finite() {
        return Err(Error::NegativeRate { what: "non-Markovian dephasing".into(), rate: gamma_z });
    }
    let z = ops::sigma_z();
    let s = Superoperator::sandwich(&z, &z)?.try_add(&Superoperator::identity(z.space()).scaled(-1.0))?;
    Ok(s.scaled(gamma_z))
}

/// Default cap on stored history propagators.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;
/// Largest supported Hilbert-space dimension for the dense history method.
pub const MAX_DIM: usize = 64;

pub fn solve_pmme(model: &PMMEModel, rho0: &DensityMatrix, grid: &[f64], opts: &SolverOptions) -> Result<EvolutionResult> {
    solve_pmme_with_budget(model, rho0, grid, opts, DEFAULT_MEMORY_BUDGET)
}

/// As [`solve_pmme`] with an explicit byte budget for the history
/// propagators. History terms where the kernel has decayed below
/// `e^{−40}` of its peak (or past the end of a tabulated kernel) are
/// dropped.
pub fn solve_pmme_with_budget(
    model: &PMMEModel,
    rho0: &DensityMatrix,
    grid: &[f64],
    opts: &SolverOptions,
    budget: usize,
) -> Result<EvolutionResult> {
    check_grid(grid)?;
    if rho0.space() != model.l0.space() {
        return Err(Error::SpaceMismatch(format!("initial state on {} vs model on {}", rho0.space(), model.l0.space())));
    }
    let n = rho0.dim();
    if n > MAX_DIM {
        return Err(Error::InvalidArgument(format!("dimension {n} exceeds the dense history limit {MAX_DIM}")));
    }
    if grid.len() < 2 {
        return Err(Error::InvalidArgument("the grid needs at least two points".into()));
    }
    let h = grid[1] - grid[0];
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(w[1].abs() * 1e-3) {
            return Err(Error::InvalidArgument(format!("grid must be uniform: step {} vs {h}", w[1] - w[0])));
        }
    }
    let steps = grid.len() - 1;
    let span = ((model.kernel.support() / h).ceil() as usize).max(1);
    // Without a memory generator nothing needs to be stored.
    let hist = if model.l1.matrix().iter().all(|z| *z == C64::new(0.0, 0.0)) { 0 } else { span.min(steps) };
    let n2 = n * n;
    let required = (hist + 1).saturating_mul(n2 * n2).saturating_mul(std::mem::size_of::<C64>());
    if required > budget {
        return Err(Error::MemoryBudget { required, limit: budget });
    }

    // P_j = K(jh) e^{(L0+L1) jh}, j = 0..=hist.
    let step_prop = expm(&(model.combined().matrix() * c(h, 0.0)));
    let mut props: Vec<DMatrix<C64>> = Vec::with_capacity(hist + 1);
    let mut e = DMatrix::<C64>::identity(n2, n2);
    for j in 0..=hist {
        if j > 0 {
            e = &step_prop * &e;
        }
        props.push(&e * c(model.kernel.eval(j as f64 * h), 0.0));
    }
    let k0 = model.kernel.eval(0.0);
    let l0 = model.l0.matrix();
    let l1 = model.l1.matrix();

    let mut rec = Recorder::new(&opts.observables, opts.store_states, rho0.space().clone(), rho0.trace())?;
    let policy = PositivityPolicy::Report;
    let mut history: Vec<DVector<C64>> = Vec::with_capacity(grid.len());
    history.push(vec_of(rho0.matrix()));
    rec.record(grid[0], rho0.matrix().clone(), policy)?;
    let mut f_now = l0 * &history[0];

    for m in 0..steps {
        // Memory at t_{m+1}, excluding the j = 0 term that needs ρ_{m+1}.
        let target = m + 1;
        let mut mem = DVector::<C64>::zeros(n2);
        for j in 1..=target.min(hist) {
            let w = if j == target { 0.5 } else { 1.0 };
            mem.gemv(c(w * h, 0.0), &props[j], &history[target - j], c(1.0, 0.0));
        }
        let y = &history[m];
        let pred = y + &f_now * c(h, 0.0);
        let f_pred = l0 * &pred + l1 * (&mem + &pred * c(0.5 * h * k0, 0.0));
        let next = y + (&f_now + &f_pred) * c(0.5 * h, 0.0);
        f_now = l0 * &next + l1 * (&mem + &next * c(0.5 * h * k0, 0.0));
        rec.record(grid[target], unvec(&next, n), policy)?;
        history.push(next);
        // Only the last `hist` states are ever read again.
        if history.len() > hist + 1 {
            let drop = history.len() - hist - 1;
            history[drop - 1] = DVector::zeros(0);
        }
    }
    rec.diagnostics.extra.push(("history_steps".into(), hist as f64));
    Ok(rec.finish(grid.to_vec()))
}
