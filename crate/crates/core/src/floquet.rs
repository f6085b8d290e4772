//! Floquet modes of periodically driven systems and the Markovian Floquet
//! master equation for a driven qubit.
//!
//! Modes come from diagonalizing the one-period propagator `U(T, 0)`;
//! eigenvalues `e^{−iεT}` give quasienergies folded into `[−Ω/2, Ω/2)`.
//! Modes at intermediate times are `Φ_α(t) = e^{iε_α t} U(t, 0) Φ_α(0)`.

use std::f64::consts::PI;
use std::ops::Add;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{evolve_density_mapped, EvolutionResult, Hamiltonian, LindbladModel, SolverOptions};
use crate::linalg::{c, Channel, DensityMatrix, HilbertSpace, Ket, Operator, C64, I, ZERO};
use crate::noise::NoiseSpectrum;
use crate::ode::{integrate, OdeOptions};

/// Samples per period used when the caller has no preference.
pub const DEFAULT_STEPS: usize = 256;
pub const MIN_STEPS: usize = 100;

/// Fold `x` into `[−Ω/2, Ω/2)`.
pub fn fold_quasienergy(x: f64, omega: f64) -> f64 {
    let y = (x + 0.5 * omega).rem_euclid(omega) - 0.5 * omega;
    if y >= 0.5 * omega { y - omega } else { y }
}

#[derive(Debug, Clone)]
pub struct FloquetBasis {
    hamiltonian: Hamiltonian,
    period: f64,
    /// Ascending quasienergies in the first zone.
    quasienergies: Vec<f64>,
    /// Sample times `kT/steps`, `k = 0..=steps`.
    times: Vec<f64>,
    /// Modes as columns, one matrix per sample time.
    modes: Vec<DMatrix<C64>>,
    propagator: DMatrix<C64>,
    ode: OdeOptions,
}

/// Integrate `dX/dt = −iH(t)X` for a matrix of columns over `times`.
fn propagate_columns(h: &Hamiltonian, x0: &DMatrix<C64>, times: &[f64], ode: OdeOptions) -> Result<Vec<DMatrix<C64>>> {
    let (n, m) = x0.shape();
    let stat = h.is_static().then(|| h.matrix_at(0.0) * -I);
    let rhs = |t: f64, y: &DVector<C64>| {
        let x = DMatrix::from_column_slice(n, m, y.as_slice());
        let out = match &stat {
            Some(g) => g * x,
            None => (h.matrix_at(t) * -I) * x,
        };
        DVector::from_column_slice(out.as_slice())
    };
    let y0 = DVector::from_column_slice(x0.as_slice());
    let sol = integrate(rhs, y0, times, ode, |_, _| Ok(()))?;
    Ok(sol.states.iter().map(|y| DMatrix::from_column_slice(n, m, y.as_slice())).collect())
}

fn check_periodic(h: &Hamiltonian, period: f64) -> Result<()> {
    for frac in [0.0, 0.318_309_886, 0.771_234_5] {
        let t = frac * period;
        let a = h.matrix_at(t);
        let b = h.matrix_at(t + period);
        let deviation = (&a - &b).norm();
        if deviation > 1e-10 * a.norm().max(1.0) {
            return Err(Error::NotPeriodic { period, t, deviation });
        }
    }
    Ok(())
}

/// Floquet decomposition of `h` with period `period`, sampled at `steps`
/// intervals per period.
pub fn floquet_modes(h: &Hamiltonian, period: f64, steps: usize) -> Result<FloquetBasis> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
    }
    if steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!("at least {MIN_STEPS} steps per period are required, got {steps}")));
    }
    h.validate(&[0.0, 0.25 * period, 0.5 * period])?;
    check_periodic(h, period)?;
    let n = h.space().total();
    let omega = 2.0 * PI / period;
    let times: Vec<f64> = (0..=steps).map(|k| period * k as f64 / steps as f64).collect();
    let ode = OdeOptions::tight();
    let props = propagate_columns(h, &DMatrix::identity(n, n), &times, ode)?;
    let u = props.last().unwrap().clone();

    // U is normal, so its Schur vectors are eigenvectors.
    let (q, t) = u.clone().schur().unpack();
    let mut order: Vec<(f64, usize, usize)> = (0..n)
        .map(|k| {
            let lam = t[(k, k)];
            let eps = fold_quasienergy(-lam.arg() / period, omega);
            let col = q.column(k);
            let peak = (0..n).max_by(|&a, &b| col[a].norm().total_cmp(&col[b].norm())).unwrap_or(0);
            (eps, peak, k)
        })
        .collect();
    order.sort_by(|a, b| {
        if (a.0 - b.0).abs() <= 1e-12 * omega.max(1.0) {
            a.1.cmp(&b.1)
        } else {
            a.0.total_cmp(&b.0)
        }
    });
    let quasienergies: Vec<f64> = order.iter().map(|o| o.0).collect();
    let mut phi0 = DMatrix::<C64>::zeros(n, n);
    for (j, o) in order.iter().enumerate() {
        let col = q.column(o.2);
        // Fix the gauge: largest component real and positive.
        let big = col[o.1];
        let phase = if big.norm() > 0.0 { big.conj() / big.norm() } else { c(1.0, 0.0) };
        phi0.set_column(j, &(col * phase));
    }
    let modes = times
        .iter()
        .zip(&props)
        .map(|(tk, uk)| {
            let mut m = uk * &phi0;
            for (j, eps) in quasienergies.iter().enumerate() {
                let ph = C64::from_polar(1.0, eps * tk);
                for i in 0..n {
                    m[(i, j)] *= ph;
                }
            }
            m
        })
        .collect();
    Ok(FloquetBasis { hamiltonian: h.clone(), period, quasienergies, times, modes, propagator: u, ode })
}

impl FloquetBasis {
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn quasienergies(&self) -> &[f64] {
        &self.quasienergies
    }

    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn space(&self) -> &HilbertSpace {
        self.hamiltonian.space()
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn sample_times(&self) -> &[f64] {
        &self.times
    }

    /// Mode matrices on the sample grid.
    pub fn mode_samples(&self) -> &[DMatrix<C64>] {
        &self.modes
    }

    pub fn propagator(&self) -> &DMatrix<C64> {
        &self.propagator
    }

    /// `‖U†U − I‖` for the one-period propagator.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        (self.propagator.adjoint() * &self.propagator - DMatrix::<C64>::identity(n, n)).norm()
    }

    /// Largest `‖Φ(t)†Φ(t) − I‖` over the sample grid.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        self.modes
            .iter()
            .map(|m| (m.adjoint() * m - DMatrix::<C64>::identity(n, n)).norm())
            .fold(0.0, f64::max)
    }

    /// `‖Φ(T) − Φ(0)‖`.
    pub fn periodicity_error(&self) -> f64 {
        (self.modes.last().unwrap() - &self.modes[0]).norm()
    }

    /// Modes as columns at any time. Off-grid times are reached by
    /// integrating from the preceding sample.
    pub fn modes_at(&self, t: f64) -> Result<DMatrix<C64>> {
        let s = t.rem_euclid(self.period);
        let steps = self.times.len() - 1;
        let dt = self.period / steps as f64;
        let k = ((s / dt).floor() as usize).min(steps);
        let tk = self.times[k];
        if (s - tk).abs() <= 1e-12 * self.period {
            return Ok(self.modes[k].clone());
        }
        let start = self.modes[k].clone();
        let mut m = propagate_columns(&self.hamiltonian, &start, &[tk, s], self.ode)?.pop().unwrap();
        for (j, eps) in self.quasienergies.iter().enumerate() {
            let ph = C64::from_polar(1.0, eps * (s - tk));
            for i in 0..self.dim() {
                m[(i, j)] *= ph;
            }
        }
        Ok(m)
    }

    /// Floquet-state expansion of `psi0` evolved to each time.
    pub fn evolve_ket(&self, psi0: &Ket, times: &[f64]) -> Result<Vec<Ket>> {
        if psi0.space() != self.space() {
            return Err(Error::SpaceMismatch(format!("ket on {} vs basis on {}", psi0.space(), self.space())));
        }
        let coeffs = self.modes[0].adjoint() * psi0.amplitudes();
        times
            .iter()
            .map(|&t| {
                let m = self.modes_at(t)?;
                let mut v = DVector::<C64>::zeros(self.dim());
                for (a, eps) in self.quasienergies.iter().enumerate() {
                    v += m.column(a) * (coeffs[a] * C64::from_polar(1.0, -eps * t));
                }
                Ok(Ket::from_parts_unchecked(v, self.space().clone()))
            })
            .collect()
    }

    /// Same physics with `ε_α → ε_α + nΩ` and `Φ_α(t) → e^{inΩt} Φ_α(t)`.
    pub fn shifted(&self, alpha: usize, n: i32) -> FloquetBasis {
        let mut out = self.clone();
        let w = self.omega() * n as f64;
        out.quasienergies[alpha] += w;
        for (tk, m) in out.times.iter().zip(out.modes.iter_mut()) {
            let ph = C64::from_polar(1.0, w * tk);
            for i in 0..m.nrows() {
                m[(i, alpha)] *= ph;
            }
        }
        out
    }
}

/// Coupling channels of a Floquet qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FloquetChannel {
    /// Excitation `|Φ1⟩⟨Φ0|`.
    Plus,
    /// Relaxation `|Φ0⟩⟨Φ1|`.
    Minus,
    /// Dephasing `|Φ1⟩⟨Φ1| − |Φ0⟩⟨Φ0|`.
    Phi,
}

impl FloquetChannel {
    pub const ALL: [FloquetChannel; 3] = [FloquetChannel::Plus, FloquetChannel::Minus, FloquetChannel::Phi];

    pub fn zeta(self) -> f64 {
        match self {
            FloquetChannel::Phi => 0.5,
            _ => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FloquetChannel::Plus => "plus",
            FloquetChannel::Minus => "minus",
            FloquetChannel::Phi => "phi",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FloquetCouplings {
    pub kmax: usize,
    pub omega_d: f64,
    /// `ε_1 − ε_0`.
    pub epsilon01: f64,
    /// Coefficients indexed by `k + kmax`.
    pub g_plus: Vec<C64>,
    pub g_minus: Vec<C64>,
    pub g_phi: Vec<C64>,
    /// Floquet ladder operators at `t = 0`.
    pub c_plus: Operator,
    pub c_minus: Operator,
    pub c_phi: Operator,
    /// Fraction of the Parseval total outside `|k| ≤ kmax`, per channel.
    pub truncated: [f64; 3],
    /// Largest `|g_{k+} − conj(g_{−k,−})|`.
    pub pairing_error: f64,
}

impl FloquetCouplings {
    fn index(ch: FloquetChannel) -> usize {
        match ch {
            FloquetChannel::Plus => 0,
            FloquetChannel::Minus => 1,
            FloquetChannel::Phi => 2,
        }
    }

    pub fn coefficients(&self, ch: FloquetChannel) -> &[C64] {
        match ch {
            FloquetChannel::Plus => &self.g_plus,
            FloquetChannel::Minus => &self.g_minus,
            FloquetChannel::Phi => &self.g_phi,
        }
    }

    pub fn g(&self, ch: FloquetChannel, k: i64) -> C64 {
        let idx = k + self.kmax as i64;
        if idx < 0 || idx as usize >= self.g_plus.len() {
            return ZERO;
        }
        self.coefficients(ch)[idx as usize]
    }

    /// Filter frequency `ω_{kμ}`.
    pub fn omega_k(&self, ch: FloquetChannel, k: i64) -> f64 {
        let base = k as f64 * self.omega_d;
        match ch {
            FloquetChannel::Plus => base - self.epsilon01,
            FloquetChannel::Minus => base + self.epsilon01,
            FloquetChannel::Phi => base,
        }
    }

    pub fn ks(&self) -> impl Iterator<Item = i64> {
        let k = self.kmax as i64;
        -k..=k
    }

    pub fn truncated_fraction(&self, ch: FloquetChannel) -> f64 {
        self.truncated[Self::index(ch)]
    }

    pub fn operator(&self, ch: FloquetChannel) -> &Operator {
        match ch {
            FloquetChannel::Plus => &self.c_plus,
            FloquetChannel::Minus => &self.c_minus,
            FloquetChannel::Phi => &self.c_phi,
        }
    }
}

/// Warn when more than this fraction of the coupling weight is cut off.
const TRUNCATION_WARNING: f64 = 0.01;

/// Fourier coefficients of the coupling `sigma` in the Floquet basis of a
/// two-level system, by trapezoidal quadrature over the sample grid.
pub fn floquet_couplings(basis: &FloquetBasis, sigma: &Operator, kmax: usize) -> Result<FloquetCouplings> {
    if basis.dim() != 2 {
        return Err(Error::InvalidArgument(format!("Floquet couplings need a two-level system, got dimension {}", basis.dim())));
    }
    if kmax < 1 {
        return Err(Error::InvalidArgument("kmax must be at least 1".into()));
    }
    if sigma.space() != basis.space() {
        return Err(Error::SpaceMismatch(format!("coupling on {} vs basis on {}", sigma.space(), basis.space())));
    }
    sigma.ensure_hermitian()?;
    let steps = basis.times.len() - 1;
    let wd = basis.omega();
    // Periodic trapezoid: the end point duplicates the start.
    let mut f_plus = Vec::with_capacity(steps);
    let mut f_minus = Vec::with_capacity(steps);
    let mut f_phi = Vec::with_capacity(steps);
    for m in &basis.modes[..steps] {
        let s = m.adjoint() * sigma.matrix() * m;
        f_plus.push(s[(1, 0)]);
        f_minus.push(s[(0, 1)]);
        f_phi.push((s[(1, 1)] - s[(0, 0)]) * 0.5);
    }
    let transform = |f: &[C64], k: i64| -> C64 {
        let mut acc = ZERO;
        for (j, v) in f.iter().enumerate() {
            acc += v * C64::from_polar(1.0, k as f64 * wd * basis.times[j]);
        }
        acc / steps as f64
    };
    let ks: Vec<i64> = (-(kmax as i64)..=kmax as i64).collect();
    let g_plus: Vec<C64> = ks.iter().map(|&k| transform(&f_plus, k)).collect();
    let g_minus: Vec<C64> = ks.iter().map(|&k| transform(&f_minus, k)).collect();
    let g_phi: Vec<C64> = ks.iter().map(|&k| transform(&f_phi, k)).collect();

    let mut truncated = [0.0; 3];
    let names = ["plus", "minus", "phi"];
    for (idx, (f, g)) in [(&f_plus, &g_plus), (&f_minus, &g_minus), (&f_phi, &g_phi)].into_iter().enumerate() {
        let total: f64 = f.iter().map(|v| v.norm_sqr()).sum::<f64>() / steps as f64;
        let kept: f64 = g.iter().map(|v| v.norm_sqr()).sum();
        let frac = if total > 0.0 { ((total - kept) / total).max(0.0) } else { 0.0 };
        truncated[idx] = frac;
        if frac > TRUNCATION_WARNING {
            let mut suggest = kmax;
            let mut acc = kept;
            while suggest < steps / 2 && (total - acc) / total > TRUNCATION_WARNING {
                suggest += 1;
                acc += transform(f, suggest as i64).norm_sqr() + transform(f, -(suggest as i64)).norm_sqr();
            }
            log::warn!(
                "Floquet coupling channel {}: {:.1}% of the weight lies beyond kmax = {kmax}; try kmax = {suggest}",
                names[idx],
                100.0 * frac
            );
        }
    }
    let mut pairing_error = 0.0f64;
    for (i, gp) in g_plus.iter().enumerate() {
        let mirror = g_minus[g_minus.len() - 1 - i];
        pairing_error = pairing_error.max((gp - mirror.conj()).norm());
    }
    let m0 = &basis.modes[0];
    let outer = |a: usize, b: usize| m0.column(a) * m0.column(b).adjoint();
    let space = basis.space().clone();
    let c_plus = Operator::from_parts_unchecked(outer(1, 0), space.clone());
    let c_minus = Operator::from_parts_unchecked(outer(0, 1), space.clone());
    let c_phi = Operator::from_parts_unchecked(outer(1, 1) - outer(0, 0), space);
    Ok(FloquetCouplings {
        kmax,
        omega_d: wd,
        epsilon01: basis.quasienergies[1] - basis.quasienergies[0],
        g_plus,
        g_minus,
        g_phi,
        c_plus,
        c_minus,
        c_phi,
        truncated,
        pairing_error,
    })
}

/// `F_μ(ω, t) = (1/πζ_μ) Σ_k t sinc[(ω − ω_{kμ}) t] |g_{kμ}|²`.
pub fn filter_function(couplings: &FloquetCouplings, ch: FloquetChannel, omega: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("filter time must be positive, got {t}")));
    }
    let sum: f64 = couplings
        .ks()
        .map(|k| {
            let x = (omega - couplings.omega_k(ch, k)) * t;
            let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
            t * sinc * couplings.g(ch, k).norm_sqr()
        })
        .sum();
    Ok(sum / (PI * ch.zeta()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FloquetRates {
    /// Excitation rate.
    pub gamma_plus: f64,
    /// Relaxation rate.
    pub gamma_minus: f64,
    /// Pure dephasing rate.
    pub gamma_phi: f64,
    /// A singular zero-frequency dephasing term was left out.
    pub skipped_singular: bool,
}

impl Add for FloquetRates {
    type Output = FloquetRates;
    fn add(self, o: FloquetRates) -> FloquetRates {
        FloquetRates {
            gamma_plus: self.gamma_plus + o.gamma_plus,
            gamma_minus: self.gamma_minus + o.gamma_minus,
            gamma_phi: self.gamma_phi + o.gamma_phi,
            skipped_singular: self.skipped_singular || o.skipped_singular,
        }
    }
}

impl FloquetRates {
    pub fn get(&self, ch: FloquetChannel) -> f64 {
        match ch {
            FloquetChannel::Plus => self.gamma_plus,
            FloquetChannel::Minus => self.gamma_minus,
            FloquetChannel::Phi => self.gamma_phi,
        }
    }
}

/// `γ_± = Σ_k |g_{k±}|² S(ω_{k±})`, `γ_φ = Σ_k 2|g_{kφ}|² S(kω_d)`.
pub fn floquet_rates(couplings: &FloquetCouplings, spectrum: &NoiseSpectrum) -> Result<FloquetRates> {
    spectrum.validate()?;
    let mut rates = FloquetRates::default();
    for ch in FloquetChannel::ALL {
        let weight = if ch == FloquetChannel::Phi { 2.0 } else { 1.0 };
        let mut acc = 0.0;
        for k in couplings.ks() {
            let g2 = couplings.g(ch, k).norm_sqr();
            if g2 == 0.0 {
                continue;
            }
            let w = couplings.omega_k(ch, k);
            if ch == FloquetChannel::Phi && k == 0 && spectrum.singular_at_zero() {
                log::warn!("skipping the zero-frequency dephasing term: the noise spectrum is singular at 0 (|g|² = {g2:.3e})");
                rates.skipped_singular = true;
                continue;
            }
            acc += weight * g2 * spectrum.eval(w)?;
        }
        match ch {
            FloquetChannel::Plus => rates.gamma_plus = acc,
            FloquetChannel::Minus => rates.gamma_minus = acc,
            FloquetChannel::Phi => rates.gamma_phi = acc,
        }
    }
    Ok(rates)
}

/// Markovian Floquet master equation. The state is evolved in the
/// Floquet-mode frame, where the ladder operators are constant, and mapped
/// back to the lab frame through the modes at each output time.
pub fn solve_floquet_markov(
    basis: &FloquetBasis,
    rates: &FloquetRates,
    rho0: &DensityMatrix,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<EvolutionResult> {
    if basis.dim() != 2 {
        return Err(Error::InvalidArgument(format!("Floquet master equation needs a two-level system, got dimension {}", basis.dim())));
    }
    if rho0.space() != basis.space() {
        return Err(Error::SpaceMismatch(format!("initial state on {} vs basis on {}", rho0.space(), basis.space())));
    }
    let q = HilbertSpace::qubit();
    let h_f = Operator::diagonal(&q, &basis.quasienergies)?;
    let lower = crate::linalg::ops::sigma_minus();
    let raise = crate::linalg::ops::sigma_plus();
    let dephase = crate::linalg::ops::sigma_z();
    let channels = vec![
        Channel::new(raise, rates.gamma_plus)?,
        Channel::new(lower, rates.gamma_minus)?,
        Channel::new(dephase, 0.5 * rates.gamma_phi)?,
    ];
    let model = LindbladModel::new(h_f, channels)?;
    let m0 = &basis.modes[0];
    let y0 = m0.adjoint() * rho0.matrix() * m0;
    let frames: Vec<DMatrix<C64>> = grid.iter().map(|&t| basis.modes_at(t)).collect::<Result<_>>()?;
    let lookup = |t: f64| -> &DMatrix<C64> {
        let k = grid.partition_point(|g| *g < t).min(grid.len() - 1);
        &frames[k]
    };
    evolve_density_mapped(|t, rho| model.apply(t, rho), &y0, rho0.space(), grid, opts, true, |t, m| {
        let f = lookup(t);
        f * m * f.adjoint()
    })
}

/// Direct Schrödinger integration of `psi0` under `h`, for cross-checks.
pub fn integrate_ket(h: &Hamiltonian, psi0: &Ket, times: &[f64], ode: OdeOptions) -> Result<Vec<Ket>> {
    let x0 = DMatrix::from_column_slice(psi0.amplitudes().len(), 1, psi0.amplitudes().as_slice());
    let out = propagate_columns(h, &x0, times, ode)?;
    Ok(out
        .into_iter()
        .map(|m| Ket::from_parts_unchecked(DVector::from_column_slice(m.as_slice()), psi0.space().clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{solve_lindblad, Drive};
    use crate::linalg::ops;
    use crate::ode::linspace;
    use approx::assert_abs_diff_eq;

    fn driven_qubit(wq: f64, amp: f64, wd: f64) -> Hamiltonian {
        Hamiltonian::driven(ops::sigma_z().scaled(c(wq / 2.0, 0.0)), vec![(ops::sigma_x(), Drive::cosine(amp, wd))]).unwrap()
    }

    #[test]
    fn folding() {
        let w = 2.0;
        assert_abs_diff_eq!(fold_quasienergy(1.0, w), -1.0);
        assert_abs_diff_eq!(fold_quasienergy(-1.0, w), -1.0);
        assert_abs_diff_eq!(fold_quasienergy(2.3, w), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(fold_quasienergy(-0.3, w), -0.3, epsilon = 1e-15);
    }

    #[test]
    fn undriven_quasienergies_are_folded_eigenvalues() {
        let wq = 1.7;
        let wd = 2.5;
        let h = driven_qubit(wq, 0.0, wd);
        let b = floquet_modes(&h, 2.0 * PI / wd, 128).unwrap();
        let mut expect = vec![fold_quasienergy(-wq / 2.0, wd), fold_quasienergy(wq / 2.0, wd)];
        expect.sort_by(f64::total_cmp);
        for (a, e) in b.quasienergies().iter().zip(&expect) {
            assert_abs_diff_eq!(*a, *e, epsilon = 1e-10);
        }
        assert!(b.unitarity_error() < 1e-10);
        assert!(b.orthonormality_error() < 1e-8);
        assert!(b.periodicity_error() < 1e-8);
    }

    #[test]
    fn non_periodic_hamiltonian_rejected() {
        let h = driven_qubit(1.0, 0.3, 2.0);
        assert!(matches!(floquet_modes(&h, 2.0, 128), Err(Error::NotPeriodic { .. })));
        assert!(floquet_modes(&h, PI, 50).is_err());
    }

    #[test]
    fn resonant_drive_splitting() {
        let wq = 20.0;
        let amp = 0.2;
        let b = floquet_modes(&driven_qubit(wq, amp, wq), 2.0 * PI / wq, 256).unwrap();
        let q = b.quasienergies();
        let gap = (q[1] - q[0]).abs().min(wq - (q[1] - q[0]).abs());
        assert!((gap - amp).abs() < 5.0 * amp * amp / wq, "gap {gap}");
    }

    #[test]
    fn reconstruction_matches_direct_integration() {
        let h = driven_qubit(1.0, 0.8, 1.3);
        let period = 2.0 * PI / 1.3;
        let b = floquet_modes(&h, period, 200).unwrap();
        let psi0 = Ket::from_amplitudes(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let times = linspace(0.0, 5.0 * period, 101);
        let a = b.evolve_ket(&psi0, &times).unwrap();
        let d = integrate_ket(&h, &psi0, &times, OdeOptions::tight()).unwrap();
        for (x, y) in a.iter().zip(&d) {
            assert!((x.amplitudes() - y.amplitudes()).norm() < 1e-7);
        }
    }

    #[test]
    fn undriven_couplings_and_rates() {
        let wq = 1.0;
        let b = floquet_modes(&driven_qubit(wq, 0.0, 3.0), 2.0 * PI / 3.0, 128).unwrap();
        let cp = floquet_couplings(&b, &ops::sigma_x(), 3).unwrap();
        for k in cp.ks() {
            if k != 0 {
                assert!(cp.g(FloquetChannel::Minus, k).norm() < 1e-12);
            }
        }
        assert_abs_diff_eq!(cp.g(FloquetChannel::Minus, 0).norm(), 1.0, epsilon = 1e-12);
        assert!(cp.pairing_error < 1e-12);
        let s0 = 0.05;
        let r = floquet_rates(&cp, &NoiseSpectrum::flat(s0)).unwrap();
        assert_abs_diff_eq!(r.gamma_minus, s0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.gamma_plus, s0, epsilon = 1e-12);
        assert!(r.gamma_phi.abs() < 1e-20);
        let zero = floquet_rates(&cp, &NoiseSpectrum::flat(0.0)).unwrap();
        assert_eq!(zero.gamma_minus, 0.0);
        let ident = floquet_couplings(&b, &ops::identity(2), 3).unwrap();
        for ch in FloquetChannel::ALL {
            assert!(ident.coefficients(ch).iter().all(|g| g.norm() < 1e-12));
        }
    }

    #[test]
    fn filter_function_peak() {
        let b = floquet_modes(&driven_qubit(1.0, 0.0, 3.0), 2.0 * PI / 3.0, 128).unwrap();
        let cp = floquet_couplings(&b, &ops::sigma_x(), 2).unwrap();
        let t = 7.0;
        let w0 = cp.omega_k(FloquetChannel::Minus, 0);
        let peak = filter_function(&cp, FloquetChannel::Minus, w0, t).unwrap();
        assert_abs_diff_eq!(peak, t / PI, epsilon = 1e-10);
        let l = filter_function(&cp, FloquetChannel::Minus, w0 - 0.2, t).unwrap();
        let r = filter_function(&cp, FloquetChannel::Minus, w0 + 0.2, t).unwrap();
        assert_abs_diff_eq!(l, r, epsilon = 1e-12);
        assert!(filter_function(&cp, FloquetChannel::Minus, w0, 0.0).is_err());
    }

    #[test]
    fn undriven_master_equation_matches_lindblad() {
        let wq = 1.2;
        let s0 = 0.1;
        let h = driven_qubit(wq, 0.0, 4.0);
        let b = floquet_modes(&h, 2.0 * PI / 4.0, 128).unwrap();
        let cp = floquet_couplings(&b, &ops::sigma_x(), 2).unwrap();
        let rates = floquet_rates(&cp, &NoiseSpectrum::flat(s0)).unwrap();
        let rho0 = DensityMatrix::from_ket(&Ket::from_amplitudes(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap()).unwrap();
        let grid = linspace(0.0, 8.0, 41);
        let a = solve_floquet_markov(&b, &rates, &rho0, &grid, &SolverOptions::default()).unwrap();
        let model = LindbladModel::new(
            ops::sigma_z().scaled(c(wq / 2.0, 0.0)),
            vec![Channel::new(ops::sigma_minus(), s0).unwrap(), Channel::new(ops::sigma_plus(), s0).unwrap()],
        )
        .unwrap();
        let l = solve_lindblad(&model, &rho0, &grid, &SolverOptions::default()).unwrap();
        for (x, y) in a.states.iter().zip(&l.states) {
            assert!((x.matrix() - y.matrix()).norm() < 1e-6);
        }
    }
}
