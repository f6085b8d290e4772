//! Adaptive Dormand–Prince 5(4) integration for complex vector ODEs.
//!
//! Matrix-valued problems are integrated on their column-stacked
//! vectorization. By default steps are shortened to land on every output
//! time. With `stop_at_grid` off, output times are filled by cubic Hermite
//! interpolation between accepted steps, which is cheaper for dense grids
//! but only fourth-order accurate.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Land exactly on every output time instead of interpolating.
    pub stop_at_grid: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
            stop_at_grid: true,
        }
    }
}

impl OdeOptions {
    pub fn tight() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, ..Self::default() }
    }

    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(acc: &mut DVector<C64>, a: f64, x: &DVector<C64>) {
    let s = C64::new(a, 0.0);
    for (yi, xi) in acc.iter_mut().zip(x.iter()) {
        *yi += s * xi;
    }
}

fn combo(y: &DVector<C64>, h: f64, terms: &[(f64, &DVector<C64>)]) -> DVector<C64> {
    let mut out = y.clone();
    for &(coef, k) in terms {
        if coef != 0.0 {
            axpy(&mut out, h * coef, k);
        }
    }
    out
}

/// Stateful Dormand–Prince stepper.
pub struct Dopri5<F>
where
    F: FnMut(f64, &DVector<C64>) -> DVector<C64>,
{
    rhs: F,
    opts: OdeOptions,
    t: f64,
    y: DVector<C64>,
    f: DVector<C64>,
    h: f64,
    prev: Option<(f64, DVector<C64>, DVector<C64>)>,
    stats: OdeStats,
}

impl<F> Dopri5<F>
where
    F: FnMut(f64, &DVector<C64>) -> DVector<C64>,
{
    pub fn new(mut rhs: F, t0: f64, y0: DVector<C64>, opts: OdeOptions) -> Self {
        let f = rhs(t0, &y0);
        let mut s = Self {
            rhs,
            opts,
            t: t0,
            y: y0,
            f,
            h: 0.0,
            prev: None,
            stats: OdeStats { rhs_evals: 1, ..OdeStats::default() },
        };
        s.h = s.opts.h_init.unwrap_or_else(|| s.initial_step());
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &DVector<C64> {
        &self.y
    }

    pub fn y_mut(&mut self) -> &mut DVector<C64> {
        &mut self.y
    }

    pub fn stats(&self) -> OdeStats {
        self.stats
    }

    pub fn last_step(&self) -> Option<(f64, f64)> {
        self.prev.as_ref().map(|(t0, _, _)| (*t0, self.t))
    }

    /// Previous accepted point, if any.
    pub fn previous(&self) -> Option<(f64, &DVector<C64>)> {
        self.prev.as_ref().map(|(t0, y0, _)| (*t0, y0))
    }

    /// Restart from a new state, discarding step history.
    pub fn reset(&mut self, t: f64, y: DVector<C64>) {
        self.f = (self.rhs)(t, &y);
        self.stats.rhs_evals += 1;
        self.t = t;
        self.y = y;
        self.prev = None;
    }

    fn weighted_norm(&self, v: &DVector<C64>, scale_a: &DVector<C64>, scale_b: &DVector<C64>) -> f64 {
        let n = v.len().max(1);
        let mut acc = 0.0;
        for i in 0..v.len() {
            let sc = self.opts.atol + self.opts.rtol * scale_a[i].norm().max(scale_b[i].norm());
            let r = v[i].norm() / sc;
            acc += r * r;
        }
        (acc / n as f64).sqrt()
    }

    fn initial_step(&mut self) -> f64 {
        let d0 = self.weighted_norm(&self.y, &self.y, &self.y);
        let d1 = self.weighted_norm(&self.f, &self.y, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.opts.h_max);
        let y1 = combo(&self.y, h0, &[(1.0, &self.f)]);
        let f1 = (self.rhs)(self.t + h0, &y1);
        self.stats.rhs_evals += 1;
        let df = &f1 - &self.f;
        let d2 = self.weighted_norm(&df, &self.y, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.opts.h_max)
    }

    /// Fifth-order stages from `(t, y)` with slope `f0`; returns the new
    /// state, its slope, and the embedded error vector.
    fn stages(
        &mut self,
        t: f64,
        y: &DVector<C64>,
        f0: &DVector<C64>,
        h: f64,
    ) -> (DVector<C64>, DVector<C64>, DVector<C64>) {
        let k1 = f0;
        let k2 = (self.rhs)(t + C2 * h, &combo(y, h, &[(A21, k1)]));
        let k3 = (self.rhs)(t + C3 * h, &combo(y, h, &[(A31, k1), (A32, &k2)]));
        let k4 = (self.rhs)(t + C4 * h, &combo(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = (self.rhs)(
            t + C5 * h,
            &combo(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = (self.rhs)(
            t + h,
            &combo(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combo(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = (self.rhs)(t + h, &y_new);
        self.stats.rhs_evals += 6;
        let mut err = DVector::zeros(y.len());
        for (coef, k) in [(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)] {
            axpy(&mut err, h * coef, k);
        }
        (y_new, k7, err)
    }

    /// One fixed step of size `h` from an arbitrary state, with no error
    /// control and no effect on the stepper's own state.
    pub fn single_step(&mut self, t: f64, y: &DVector<C64>, h: f64) -> DVector<C64> {
        let f0 = (self.rhs)(t, y);
        self.stats.rhs_evals += 1;
        self.stages(t, y, &f0, h).0
    }

    /// Take one accepted step without passing `t_max`.
    pub fn step_until(&mut self, t_max: f64) -> Result<()> {
        if self.t >= t_max {
            return Ok(());
        }
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(Error::TooManySteps(self.opts.max_steps));
            }
            let remaining = t_max - self.t;
            let mut h = self.h.min(self.opts.h_max);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            let min_h = 1e-14 * self.t.abs().max(1.0);
            if h < min_h && !last {
                return Err(Error::StepSizeUnderflow { t: self.t, h });
            }
            let f0 = self.f.clone();
            let y0 = self.y.clone();
            let (y_new, f_new, err) = self.stages(self.t, &y0, &f0, h);
            let en = self.weighted_norm(&err, &y0, &y_new);
            if en.is_finite() && en <= 1.0 {
                let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                self.prev = Some((self.t, y0, f0));
                self.t = if last { t_max } else { self.t + h };
                self.y = y_new;
                self.f = f_new;
                self.stats.accepted += 1;
                // Do not let a short final step collapse the step size.
                if !last || factor > 1.0 {
                    self.h = h * factor;
                }
                return Ok(());
            }
            self.stats.rejected += 1;
            let factor = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
            self.h = h * factor;
            if self.h < min_h {
                return Err(Error::StepSizeUnderflow { t: self.t, h: self.h });
            }
        }
    }

    /// Recompute the slope after the caller modified the state in place.
    pub fn refresh_slope(&mut self) {
        self.f = (self.rhs)(self.t, &self.y);
        self.stats.rhs_evals += 1;
    }

    /// Cubic Hermite interpolation inside the last accepted step.
    pub fn interpolate(&self, t: f64) -> DVector<C64> {
        let Some((t0, y0, f0)) = &self.prev else {
            return self.y.clone();
        };
        let h = self.t - t0;
        if h <= 0.0 {
            return self.y.clone();
        }
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = y0 * C64::new(h00, 0.0);
        axpy(&mut out, h10 * h, f0);
        axpy(&mut out, h01, &self.y);
        axpy(&mut out, h11 * h, &self.f);
        out
    }
}

/// Integration output on a grid.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<DVector<C64>>,
    pub stats: OdeStats,
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid has non-finite entries".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Integrate `y' = rhs(t, y)` from `grid[0]` and report the state at every
/// grid time. `post_step` may modify each accepted state (for example to
/// restore symmetry) and may abort the run by returning an error.
pub fn integrate<F, P>(
    rhs: F,
    y0: DVector<C64>,
    grid: &[f64],
    opts: OdeOptions,
    mut post_step: P,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &DVector<C64>) -> DVector<C64>,
    P: FnMut(f64, &mut DVector<C64>) -> Result<()>,
{
    check_grid(grid)?;
    let mut stepper = Dopri5::new(rhs, grid[0], y0.clone(), opts);
    let mut states = Vec::with_capacity(grid.len());
    states.push(y0);
    let t_end = *grid.last().unwrap();
    let mut next = 1;
    while next < grid.len() {
        let target = if opts.stop_at_grid { grid[next] } else { t_end };
        stepper.step_until(target)?;
        let t_now = stepper.t();
        post_step(t_now, stepper.y_mut())?;
        while next < grid.len() && grid[next] <= t_now {
            let y = if grid[next] == t_now { stepper.y().clone() } else { stepper.interpolate(grid[next]) };
            states.push(y);
            next += 1;
        }
    }
    Ok(OdeSolution { times: grid.to_vec(), states, stats: stepper.stats() })
}

/// Evenly spaced grid including both end points.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (points - 1) as f64;
            (0..points)
                .map(|k| if k == points - 1 { end } else { start + step * k as f64 })
                .collect()
        }
    }
}
