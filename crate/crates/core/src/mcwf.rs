//! Monte Carlo wave-function trajectories.
//!
//! Between jumps a ket evolves under `H_eff = H − (i/2) Σ C†C` and loses
//! norm. A jump fires when the squared norm crosses a uniform threshold;
//! the crossing time is located by bisection inside the step, a channel is
//! drawn with weights `‖C_m ψ‖²` and the state is renormalized.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{Hamiltonian, LindbladModel};
use crate::linalg::{c, Channel, DensityMatrix, HilbertSpace, Ket, Operator, QuantumState, C64, I};
use crate::ode::{check_grid, Dopri5, OdeOptions, OdeStats};
use crate::rng::{open_unit, stream, Stream};

/// Hamiltonian plus collapse operators with rates folded in.
#[derive(Clone)]
pub struct JumpModel {
    pub hamiltonian: Hamiltonian,
    pub collapse_ops: Vec<Operator>,
}

impl std::fmt::Debug for JumpModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JumpModel")
            .field("space", self.hamiltonian.space())
            .field("collapse_ops", &self.collapse_ops.len())
            .finish()
    }
}

impl JumpModel {
    pub fn new(hamiltonian: impl Into<Hamiltonian>, collapse_ops: Vec<Operator>) -> Result<Self> {
        let hamiltonian = hamiltonian.into();
        for (k, op) in collapse_ops.iter().enumerate() {
            if op.space() != hamiltonian.space() {
                return Err(Error::SpaceMismatch(format!(
                    "collapse operator {k} on {} vs hamiltonian on {}",
                    op.space(),
                    hamiltonian.space()
                )));
            }
        }
        Ok(Self { hamiltonian, collapse_ops })
    }

    /// `C_m = √Γ_m L_m` for every channel.
    pub fn from_lindblad(model: &LindbladModel) -> Result<Self> {
        Self::new(model.hamiltonian.clone(), model.channels.iter().map(Channel::collapse).collect())
    }

    /// Equivalent master equation with unit-rate channels.
    pub fn to_lindblad(&self) -> Result<LindbladModel> {
        let channels = self
            .collapse_ops
            .iter()
            .map(|op| Channel::new(op.clone(), 1.0))
            .collect::<Result<Vec<_>>>()?;
        LindbladModel::new(self.hamiltonian.clone(), channels)
    }

    pub fn space(&self) -> &HilbertSpace {
        self.hamiltonian.space()
    }

    /// `Σ C_m† C_m`.
    pub fn loss_operator(&self) -> DMatrix<C64> {
        let n = self.space().total();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for op in &self.collapse_ops {
            acc += op.matrix().adjoint() * op.matrix();
        }
        acc
    }
}

/// `H − (i/2) Σ C†C` at time `t`.
pub fn effective_hamiltonian_at(model: &JumpModel, t: f64) -> Operator {
    let m = model.hamiltonian.matrix_at(t) - model.loss_operator() * c(0.0, 0.5);
    Operator::from_parts_unchecked(m, model.space().clone())
}

pub fn effective_hamiltonian(model: &JumpModel) -> Operator {
    effective_hamiltonian_at(model, 0.0)
}

/// Three lowest transmon levels `g, e, f` with an `e ↔ f` exchange and
/// cascaded decay.
pub fn transmon_three_level(j: f64, delta: f64, gamma_e: f64, gamma_f: f64) -> Result<JumpModel> {
    for (name, g) in [("gamma_e", gamma_e), ("gamma_f", gamma_f)] {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::NegativeRate { what: name.into(), rate: g });
        }
    }
    let h = Operator::from_real_rows(&[&[0.0, 0.0, 0.0], &[0.0, delta / 2.0, j], &[0.0, j, delta / 2.0]])?;
    let ce = crate::linalg::ops::transition(3, 0, 1).scaled(c(gamma_e.sqrt(), 0.0));
    let cf = crate::linalg::ops::transition(3, 1, 2).scaled(c(gamma_f.sqrt(), 0.0));
    JumpModel::new(h, vec![ce, cf])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub channel: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Normalized states on the grid.
    pub kets: Vec<Ket>,
    pub jumps: Vec<Jump>,
    pub master_seed: u64,
    pub index: u64,
    pub stats: OdeStats,
    /// Largest relative increase of the squared norm over one accepted
    /// step between jumps. Zero up to integration error.
    pub max_norm_growth: f64,
}

#[derive(Debug, Clone, Default)]
pub struct TrajectoryOptions {
    pub ode: OdeOptions,
    /// Real-valued observables tracked by [`ensemble_average`].
    pub observables: Vec<(String, Operator)>,
    /// Keep every trajectory's jump list in the ensemble result.
    pub keep_jumps: bool,
}

const MAX_BISECTIONS: usize = 200;
const NORM_RTOL: f64 = 1e-10;
/// Largest expected norm loss per step, `h·λ_max(ΣC†C)`.
const MAX_LOSS_PER_STEP: f64 = 0.05;

struct Run {
    jumps: Vec<Jump>,
    stats: OdeStats,
    max_norm_growth: f64,
}

fn norm_sq(v: &DVector<C64>) -> f64 {
    v.norm_squared()
}

/// Core trajectory loop. `on_grid` receives each normalized grid state.
fn run_trajectory<G>(
    model: &JumpModel,
    psi0: &Ket,
    grid: &[f64],
    rng: &mut Stream,
    opts: &OdeOptions,
    mut on_grid: G,
) -> Result<Run>
where
    G: FnMut(usize, &DVector<C64>),
{
    check_grid(grid)?;
    if psi0.space() != model.space() {
        return Err(Error::SpaceMismatch(format!("initial ket on {} vs model on {}", psi0.space(), model.space())));
    }
    if (psi0.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!("initial ket must be normalized, norm = {}", psi0.norm())));
    }
    let loss = model.loss_operator();
    let loss_max = crate::linalg::eigh(&loss).0.last().copied().unwrap_or(0.0).max(0.0);
    let mut ode = *opts;
    if loss_max > 0.0 {
        ode.h_max = ode.h_max.min(MAX_LOSS_PER_STEP / loss_max);
    }
    let static_gen = model.hamiltonian.is_static().then(|| (model.hamiltonian.matrix_at(0.0) - &loss * c(0.0, 0.5)) * -I);
    let ham = &model.hamiltonian;
    let rhs = |t: f64, y: &DVector<C64>| match &static_gen {
        Some(g) => g * y,
        None => ((ham.matrix_at(t) - &loss * c(0.0, 0.5)) * -I) * y,
    };
    let mut solver = Dopri5::new(rhs, grid[0], psi0.amplitudes().clone(), ode);
    let mut threshold = open_unit(rng);
    let mut jumps = Vec::new();
    let mut max_norm_growth = 0.0f64;
    on_grid(0, psi0.amplitudes());
    for (k, &tg) in grid.iter().enumerate().skip(1) {
        while solver.t() < tg {
            let before = norm_sq(solver.y());
            solver.step_until(tg)?;
            let after = norm_sq(solver.y());
            if before > 0.0 {
                max_norm_growth = max_norm_growth.max((after - before) / before);
            }
            if after > threshold {
                continue;
            }
            let (t0, y0) = {
                let (t0, y0) = solver.previous().expect("an accepted step exists");
                (t0, y0.clone())
            };
            let t1 = solver.t();
            let (tj, yj) = locate_crossing(&mut solver, t0, &y0, t1, threshold)?;
            let channel = select_channel(model, &yj, tj, rng)?;
            let jumped = model.collapse_ops[channel].matrix() * &yj;
            let nrm = jumped.norm();
            solver.reset(tj, jumped.unscale(nrm));
            jumps.push(Jump { time: tj, channel });
            threshold = open_unit(rng);
        }
        let y = solver.y();
        on_grid(k, &y.unscale(y.norm()));
    }
    Ok(Run { jumps, stats: solver.stats(), max_norm_growth })
}

/// Bisection for `‖ψ(t)‖² = threshold` inside `(t0, t1]`, using exact
/// Runge–Kutta steps from the start of the interval.
fn locate_crossing<F>(
    solver: &mut Dopri5<F>,
    t0: f64,
    y0: &DVector<C64>,
    t1: f64,
    threshold: f64,
) -> Result<(f64, DVector<C64>)>
where
    F: FnMut(f64, &DVector<C64>) -> DVector<C64>,
{
    let mut lo = t0;
    let mut hi = t1;
    let mut best = (t1, solver.y().clone());
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let y = solver.single_step(t0, y0, mid - t0);
        let p = norm_sq(&y);
        if (p - threshold).abs() <= NORM_RTOL * threshold {
            return Ok((mid, y));
        }
        if p > threshold {
            lo = mid;
        } else {
            hi = mid;
            best = (mid, y);
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(best)
}

fn select_channel(model: &JumpModel, psi: &DVector<C64>, t: f64, rng: &mut Stream) -> Result<usize> {
    let weights: Vec<f64> = model.collapse_ops.iter().map(|op| (op.matrix() * psi).norm_squared()).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DeadChannel { t, state: format!("{:?}", psi.as_slice()) });
    }
    let r = open_unit(rng);
    let mut acc = 0.0;
    for (m, w) in weights.iter().enumerate() {
        acc += w / total;
        if acc >= r {
            return Ok(m);
        }
    }
    // Rounding left the cumulative sum just short of one.
    Ok(weights.iter().rposition(|w| *w > 0.0).unwrap_or(0))
}

/// One trajectory drawing from stream `index` of `master_seed`.
pub fn evolve_trajectory(
    model: &JumpModel,
    psi0: &Ket,
    grid: &[f64],
    master_seed: u64,
    index: u64,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    let mut rng = stream(master_seed, index);
    let space = model.space().clone();
    let mut kets = Vec::with_capacity(grid.len());
    let run = run_trajectory(model, psi0, grid, &mut rng, opts, |_, y| {
        kets.push(Ket::from_parts_unchecked(y.clone(), space.clone()));
    })?;
    Ok(Trajectory {
        times: grid.to_vec(),
        kets,
        jumps: run.jumps,
        master_seed,
        index,
        stats: run.stats,
        max_norm_growth: run.max_norm_growth,
    })
}

#[derive(Debug, Clone)]
pub struct ObservableStats {
    pub name: String,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JumpStatistics {
    /// Mean number of jumps per trajectory.
    pub mean: f64,
    pub std_error: f64,
    /// Total jumps per channel.
    pub per_channel: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct TrajectoryJumps {
    pub index: u64,
    pub jumps: Vec<Jump>,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub observables: Vec<ObservableStats>,
    pub n_traj: usize,
    pub jump_stats: JumpStatistics,
    /// Present when requested in the options.
    pub jumps: Vec<TrajectoryJumps>,
    pub max_norm_growth: f64,
}

impl EnsembleResult {
    pub fn observable(&self, name: &str) -> Option<&ObservableStats> {
        self.observables.iter().find(|o| o.name == name)
    }

    pub fn population(&self, level: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(level)).collect()
    }
}

struct Sample {
    projectors: Vec<DMatrix<C64>>,
    values: Vec<Vec<f64>>,
    jumps: Vec<Jump>,
    growth: f64,
}

const CHUNK: usize = 256;

/// Average `n_traj` trajectories. Results are bitwise reproducible for a
/// given seed regardless of thread count.
pub fn ensemble_average(
    model: &JumpModel,
    psi0: &Ket,
    grid: &[f64],
    n_traj: usize,
    master_seed: u64,
    opts: &TrajectoryOptions,
) -> Result<EnsembleResult> {
    if n_traj == 0 {
        return Err(Error::InvalidArgument("at least one trajectory is required".into()));
    }
    check_grid(grid)?;
    for (name, op) in &opts.observables {
        if op.space() != model.space() {
            return Err(Error::SpaceMismatch(format!("observable {name} on {} vs {}", op.space(), model.space())));
        }
    }
    let n = model.space().total();
    let npts = grid.len();
    let nobs = opts.observables.len();
    let mut rho_sum = vec![DMatrix::<C64>::zeros(n, n); npts];
    let mut obs_sum = vec![vec![0.0; npts]; nobs];
    let mut obs_sq = vec![vec![0.0; npts]; nobs];
    let mut jump_sum = 0.0;
    let mut jump_sq = 0.0;
    let mut per_channel = vec![0u64; model.collapse_ops.len()];
    let mut kept = Vec::new();
    let mut growth = 0.0f64;

    let mut start = 0;
    while start < n_traj {
        let end = (start + CHUNK).min(n_traj);
        let samples: Vec<Result<Sample>> = (start..end)
            .into_par_iter()
            .map(|idx| {
                let mut rng = stream(master_seed, idx as u64);
                let mut projectors = Vec::with_capacity(npts);
                let mut values = vec![Vec::with_capacity(npts); nobs];
                let run = run_trajectory(model, psi0, grid, &mut rng, &opts.ode, |_, y| {
                    projectors.push(y * y.adjoint());
                    for (k, (_, op)) in opts.observables.iter().enumerate() {
                        values[k].push(y.dotc(&(op.matrix() * y)).re);
                    }
                })?;
                Ok(Sample { projectors, values, jumps: run.jumps, growth: run.max_norm_growth })
            })
            .collect();
        for (offset, s) in samples.into_iter().enumerate() {
            let s = s?;
            for (acc, p) in rho_sum.iter_mut().zip(&s.projectors) {
                *acc += p;
            }
            for k in 0..nobs {
                for (i, v) in s.values[k].iter().enumerate() {
                    obs_sum[k][i] += v;
                    obs_sq[k][i] += v * v;
                }
            }
            let nj = s.jumps.len() as f64;
            jump_sum += nj;
            jump_sq += nj * nj;
            for j in &s.jumps {
                per_channel[j.channel] += 1;
            }
            growth = growth.max(s.growth);
            if opts.keep_jumps {
                kept.push(TrajectoryJumps { index: (start + offset) as u64, jumps: s.jumps });
            }
        }
        start = end;
    }

    let nf = n_traj as f64;
    let stderr = |sum: f64, sq: f64| {
        if n_traj < 2 {
            return 0.0;
        }
        let mean = sum / nf;
        let var = ((sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    };
    let states = rho_sum
        .into_iter()
        .map(|m| DensityMatrix::from_parts_unchecked(m.unscale(nf), model.space().clone()))
        .collect();
    let observables = opts
        .observables
        .iter()
        .enumerate()
        .map(|(k, (name, _))| ObservableStats {
            name: name.clone(),
            mean: obs_sum[k].iter().map(|s| s / nf).collect(),
            std_error: obs_sum[k].iter().zip(&obs_sq[k]).map(|(s, q)| stderr(*s, *q)).collect(),
        })
        .collect();
    Ok(EnsembleResult {
        times: grid.to_vec(),
        states,
        observables,
        n_traj,
        jump_stats: JumpStatistics { mean: jump_sum / nf, std_error: stderr(jump_sum, jump_sq), per_channel },
        jumps: kept,
        max_norm_growth: growth,
    })
}

/// Instantaneous `−d‖ψ‖²/dt = ⟨ψ|ΣC†C|ψ⟩` for an unnormalized ket.
pub fn norm_loss_rate(model: &JumpModel, psi: &Ket) -> f64 {
    psi.expect_unchecked(&model.loss_operator()).re
}
