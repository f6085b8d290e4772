//! Observables, state metrics and decay-curve fits.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, ops, trace_of_product, DensityMatrix, C64};

/// `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` with `σz = |e⟩⟨e| − |g⟩⟨g|`.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::SpaceMismatch(format!(
            "Bloch vector needs a two-level state, got dimension {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    Ok([
        trace_of_product(ops::sigma_x().matrix(), m).re,
        trace_of_product(ops::sigma_y().matrix(), m).re,
        trace_of_product(ops::sigma_z().matrix(), m).re,
    ])
}

/// Half the trace norm of `ρ − σ`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.space() != sigma.space() {
        return Err(Error::SpaceMismatch(format!(
            "trace distance between {} and {}",
            rho.space(),
            sigma.space()
        )));
    }
    Ok(trace_distance_matrices(rho.matrix(), sigma.matrix()))
}

/// Unchecked variant for raw Hermitian matrices of equal shape.
pub fn trace_distance_matrices(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let diff = a - b;
    // Symmetrize to keep the Hermitian eigen-solver honest on round-off.
    let herm = (&diff + diff.adjoint()) * c(0.5, 0.0);
    let (values, _) = eigh(&herm);
    0.5 * values.iter().map(|v| v.abs()).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub rate: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Angular frequency of the Ramsey fringe; `None` for plain exponential fits.
    pub frequency: Option<f64>,
    pub phase: Option<f64>,
    pub rms_residual: f64,
    /// Parameter names in the order of `covariance_diagonal`.
    pub parameters: Vec<&'static str>,
    pub covariance_diagonal: Vec<f64>,
}

impl FitResult {
    /// Decay time `1/rate`.
    pub fn time_constant(&self) -> f64 {
        1.0 / self.rate
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.parameters
            .iter()
            .position(|p| *p == name)
            .map(|k| self.covariance_diagonal[k].max(0.0).sqrt())
    }
}

pub const MIN_T1_SAMPLES: usize = 8;
pub const MIN_RAMSEY_SAMPLES: usize = 16;

fn check_samples(times: &[f64], values: &[f64], min: usize) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} times but {} samples",
            times.len(),
            values.len()
        )));
    }
    if times.len() < min {
        return Err(Error::InvalidArgument(format!(
            "need at least {min} samples, got {}",
            times.len()
        )));
    }
    if times.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite sample".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("times must be strictly increasing".into()));
    }
    Ok(())
}

fn spread(values: &[f64]) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

struct LmFit {
    params: Vec<f64>,
    covariance_diagonal: Vec<f64>,
    rms: f64,
}

/// Damped Gauss-Newton on `Σ (y_i − f(t_i; p))²` with a model returning the
/// value and its gradient in `p`.
fn levenberg_marquardt<F>(times: &[f64], data: &[f64], p0: Vec<f64>, model: F) -> Option<LmFit>
where
    F: Fn(f64, &[f64]) -> (f64, Vec<f64>),
{
    let n = times.len();
    let m = p0.len();
    let eval = |p: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let mut r = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, m);
        for (i, (&t, &y)) in times.iter().zip(data).enumerate() {
            let (f, g) = model(t, p);
            r[i] = y - f;
            for k in 0..m {
                j[(i, k)] = g[k];
            }
        }
        (r, j)
    };
    let mut p = p0;
    let (mut r, mut j) = eval(&p);
    let mut ssr = r.norm_squared();
    if !ssr.is_finite() {
        return None;
    }
    let scale = data.iter().map(|v| v * v).sum::<f64>().max(1e-300);
    let mut lambda = 1e-3;
    for _ in 0..2000 {
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * &r;
        let mut a = jtj.clone();
        for k in 0..m {
            a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
        }
        let Some(step) = a.lu().solve(&jtr) else {
            lambda *= 10.0;
            if lambda > 1e20 {
                break;
            }
            continue;
        };
        let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let (r_new, j_new) = eval(&trial);
        let ssr_new = r_new.norm_squared();
        if ssr_new.is_finite() && ssr_new <= ssr {
            let small_step = step
                .iter()
                .zip(&trial)
                .all(|(d, v)| d.abs() <= 1e-13 * (v.abs() + 1e-13));
            let small_gain = ssr - ssr_new <= 1e-16 * ssr;
            p = trial;
            r = r_new;
            j = j_new;
            ssr = ssr_new;
            lambda = (lambda / 10.0).max(1e-15);
            if small_step || small_gain || ssr <= 1e-32 * scale {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e20 {
                break;
            }
        }
    }
    let dof = (n as f64 - m as f64).max(1.0);
    let sigma2 = ssr / dof;
    let jtj = j.transpose() * &j;
    let covariance_diagonal = match jtj.clone().try_inverse() {
        Some(inv) => (0..m).map(|k| sigma2 * inv[(k, k)]).collect(),
        None => vec![f64::INFINITY; m],
    };
    Some(LmFit {
        params: p,
        covariance_diagonal,
        rms: (ssr / n as f64).sqrt(),
    })
}

fn exp_model(t: f64, p: &[f64]) -> (f64, Vec<f64>) {
    let e = (-p[1] * t).exp();
    (p[0] * e + p[2], vec![e, -p[0] * t * e, 1.0])
}

/// Straight-line fit of `ln|y − c|` on the samples that clear the offset.
fn log_linear_seed(times: &[f64], values: &[f64], offset: f64) -> Option<(f64, f64)> {
    let sign = if values[0] >= offset { 1.0 } else { -1.0 };
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter_map(|(&t, &y)| {
            let d = sign * (y - offset);
            (d > 0.0).then(|| (t, d.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let amp = sign * (ml - slope * mt).exp();
    Some((amp, -slope))
}

fn reject_constant(values: &[f64]) -> Result<f64> {
    let range = spread(values);
    let level = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if range <= 1e-12 * level.max(1.0) {
        return Err(Error::FitFailed(format!(
            "data are constant (spread {range:.3e}); nothing to fit"
        )));
    }
    Ok(range)
}

fn exponential_fit(times: &[f64], values: &[f64]) -> Result<FitResult> {
    let range = reject_constant(values)?;
    let rising = values[values.len() - 1] > values[0];
    // Offset guess just beyond the extreme the curve relaxes towards.
    let offset0 = if rising {
        values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 0.01 * range
    } else {
        values.iter().cloned().fold(f64::INFINITY, f64::min) - 0.01 * range
    };
    let duration = times[times.len() - 1] - times[0];
    let (amp0, rate0) = log_linear_seed(times, values, offset0)
        .filter(|(a, r)| a.is_finite() && r.is_finite() && *r > 0.0)
        .unwrap_or((values[0] - offset0, 1.0 / duration));
    let fit = levenberg_marquardt(times, values, vec![amp0, rate0, offset0], exp_model)
        .ok_or_else(|| Error::FitFailed("least squares diverged".into()))?;
    let [amplitude, rate, offset] = [fit.params[0], fit.params[1], fit.params[2]];
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::FitFailed(format!(
            "non-decaying data: fitted rate {rate:.3e}, amplitude {amplitude:.3e}, offset {offset:.3e}, rms residual {:.3e}",
            fit.rms
        )));
    }
    Ok(FitResult {
        rate,
        amplitude,
        offset,
        frequency: None,
        phase: None,
        rms_residual: fit.rms,
        parameters: vec!["amplitude", "rate", "offset"],
        covariance_diagonal: fit.covariance_diagonal,
    })
}

/// Fits `A e^{−t/T1} + c` to an excited-state population trace.
pub fn fit_t1(times: &[f64], population: &[f64]) -> Result<FitResult> {
    check_samples(times, population, MIN_T1_SAMPLES)?;
    if population.iter().any(|p| !(-1e-9..=1.0 + 1e-9).contains(p)) {
        log::warn!("population samples outside [0, 1]; fitting anyway");
    }
    exponential_fit(times, population)
}

fn ramsey_model(t: f64, p: &[f64]) -> (f64, Vec<f64>) {
    let e = (-p[1] * t).exp();
    let arg = p[2] * t + p[3];
    let (s, c) = arg.sin_cos();
    (
        p[0] * e * c + p[4],
        vec![e * c, -p[0] * t * e * c, -p[0] * e * s * t, -p[0] * e * s, 1.0],
    )
}

/// Angular frequency of the largest peak of the mean-subtracted discrete
/// Fourier transform, zero-padded four times.
fn dominant_frequency(times: &[f64], values: &[f64]) -> f64 {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let duration = times[n - 1] - times[0];
    let dt = duration / (n - 1) as f64;
    let nyquist = std::f64::consts::PI / dt;
    let bins = 4 * n;
    let mut best = (0.0, 0.0);
    for k in 1..bins {
        let w = nyquist * k as f64 / bins as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (&t, &y) in times.iter().zip(values) {
            let (s, c) = (w * (t - times[0])).sin_cos();
            re += (y - mean) * c;
            im += (y - mean) * s;
        }
        let power = re * re + im * im;
        if power > best.1 {
            best = (w, power);
        }
    }
    best.0
}

/// Linear least squares for `(a, b, c)` in `e^{−rt}(a cos ωt + b sin ωt) + c`.
fn linear_ramsey(times: &[f64], values: &[f64], rate: f64, omega: f64) -> Option<(f64, [f64; 3])> {
    let n = times.len();
    let basis = DMatrix::from_fn(n, 3, |i, k| {
        let t = times[i];
        let e = (-rate * t).exp();
        match k {
            0 => e * (omega * t).cos(),
            1 => e * (omega * t).sin(),
            _ => 1.0,
        }
    });
    let y = DVector::from_column_slice(values);
    let normal = basis.transpose() * &basis;
    let coef = normal.lu().solve(&(basis.transpose() * &y))?;
    let resid = (&y - &basis * &coef).norm_squared();
    Some((resid, [coef[0], coef[1], coef[2]]))
}

/// Fits `A e^{−t/T2} cos(δt + φ) + c` to a Ramsey fringe. When no oscillation
/// is resolved the result is a plain exponential with `frequency = Some(0)`.
pub fn fit_t2_ramsey(times: &[f64], signal: &[f64], detuning_hint: Option<f64>) -> Result<FitResult> {
    check_samples(times, signal, MIN_RAMSEY_SAMPLES)?;
    reject_constant(signal)?;
    let exponential = exponential_fit(times, signal);
    let omega0 = match detuning_hint {
        Some(w) if w.is_finite() && w != 0.0 => w.abs(),
        _ => dominant_frequency(times, signal),
    };
    let oscillating = ramsey_oscillating(times, signal, omega0);
    match (exponential, oscillating) {
        (Ok(exp), Some(osc)) if osc.rms_residual < 0.5 * exp.rms_residual => Ok(osc),
        (Ok(mut exp), _) => {
            exp.frequency = Some(0.0);
            exp.phase = Some(0.0);
            Ok(exp)
        }
        (Err(_), Some(osc)) => Ok(osc),
        (Err(e), None) => Err(Error::FitFailed(format!(
            "no oscillation found and no decay ({e})"
        ))),
    }
}

fn ramsey_oscillating(times: &[f64], signal: &[f64], omega0: f64) -> Option<FitResult> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return None;
    }
    let duration = times[times.len() - 1] - times[0];
    // Scan the envelope rate; amplitude, phase and offset are linear given it.
    let mut best: Option<(f64, f64, [f64; 3])> = None;
    for k in 0..=60 {
        let rate = (0.01 / duration) * 10f64.powf(k as f64 / 15.0);
        if let Some((resid, coef)) = linear_ramsey(times, signal, rate, omega0) {
            if best.map_or(true, |b| resid < b.1) {
                best = Some((rate, resid, coef));
            }
        }
    }
    let (rate0, _, [a, b, c0]) = best?;
    let amp0 = a.hypot(b);
    let phase0 = (-b).atan2(a);
    let fit = levenberg_marquardt(times, signal, vec![amp0, rate0, omega0, phase0, c0], ramsey_model)?;
    let mut p = fit.params.clone();
    if !(p[1].is_finite() && p[1] > 0.0) {
        return None;
    }
    // Canonical sign choice: positive amplitude and frequency.
    if p[2] < 0.0 {
        p[2] = -p[2];
        p[3] = -p[3];
    }
    if p[0] < 0.0 {
        p[0] = -p[0];
        p[3] += std::f64::consts::PI;
    }
    let phase = (p[3] + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
    Some(FitResult {
        rate: p[1],
        amplitude: p[0],
        offset: p[4],
        frequency: Some(p[2]),
        phase: Some(phase),
        rms_residual: fit.rms,
        parameters: vec!["amplitude", "rate", "frequency", "phase", "offset"],
        covariance_diagonal: fit.covariance_diagonal,
    })
}
