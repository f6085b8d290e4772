//! Noise spectral densities, sensitivity coefficients and golden-rule rates.
//!
//! Temperatures are given in frequency units (k_B = ħ = 1).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuits::{CircuitModel, CircuitParams, SymTridiagonal};
use crate::error::{Error, Result};
use crate::lindblad::{decoherence_times, DecoherenceTimes};

/// Spectral density `ω ↦ S(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpectrum {
    /// Frequency-independent `S0` (white noise).
    Flat { s0: f64 },
    /// `A_f² / |ω/2π|`, singular at zero frequency.
    OneOverF { a_f: f64 },
    /// `α(ω,T) A_d (ω/2π)²` with `α = |coth(ω/2T) + 1| / 2`.
    Dielectric { a_d: f64, temperature: f64 },
    /// Linear interpolation through `(omega, value)` pairs, clamped to the
    /// end values outside the table.
    Tabulated { omega: Vec<f64>, value: Vec<f64> },
}

impl NoiseSpectrum {
    pub fn flat(s0: f64) -> Self {
        NoiseSpectrum::Flat { s0 }
    }

    pub fn one_over_f(a_f: f64) -> Self {
        NoiseSpectrum::OneOverF { a_f }
    }

    pub fn dielectric(a_d: f64, temperature: f64) -> Self {
        NoiseSpectrum::Dielectric { a_d, temperature }
    }

    pub fn tabulated(omega: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        let s = NoiseSpectrum::Tabulated { omega, value };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            NoiseSpectrum::Flat { s0 } => {
                if !(*s0 >= 0.0) || !s0.is_finite() {
                    return bad(format!("flat spectrum level must be finite and non-negative, got {s0}"));
                }
            }
            NoiseSpectrum::OneOverF { a_f } => {
                if !a_f.is_finite() {
                    return bad("1/f amplitude must be finite".into());
                }
            }
            NoiseSpectrum::Dielectric { a_d, temperature } => {
                if !(*a_d >= 0.0) || !a_d.is_finite() {
                    return bad(format!("dielectric amplitude must be non-negative, got {a_d}"));
                }
                if !(*temperature >= 0.0) || !temperature.is_finite() {
                    return bad(format!("temperature must be non-negative, got {temperature}"));
                }
            }
            NoiseSpectrum::Tabulated { omega, value } => {
                if omega.len() != value.len() || omega.len() < 2 {
                    return bad("tabulated spectrum needs at least two (omega, value) pairs of equal length".into());
                }
                if omega.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("tabulated frequencies must be strictly increasing".into());
                }
                if value.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return bad("tabulated spectral values must be finite and non-negative".into());
                }
            }
        }
        Ok(())
    }

    pub fn singular_at_zero(&self) -> bool {
        matches!(self, NoiseSpectrum::OneOverF { .. })
    }

    /// Spectral density at angular frequency `omega`.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        match self {
            NoiseSpectrum::Flat { s0 } => Ok(*s0),
            NoiseSpectrum::OneOverF { a_f } => {
                if omega == 0.0 {
                    return Err(Error::SingularSpectrum { omega });
                }
                Ok(a_f * a_f / (omega / (2.0 * PI)).abs())
            }
            NoiseSpectrum::Dielectric { a_d, temperature } => {
                if omega == 0.0 {
                    return Ok(0.0);
                }
                let f = omega / (2.0 * PI);
                Ok(thermal_factor(omega, *temperature) * a_d * f * f)
            }
            NoiseSpectrum::Tabulated { omega: xs, value: ys } => {
                let n = xs.len();
                if omega <= xs[0] {
                    if omega < xs[0] {
                        log::warn!("tabulated spectrum evaluated below its range at omega = {omega}; clamping");
                    }
                    return Ok(ys[0]);
                }
                if omega >= xs[n - 1] {
                    if omega > xs[n - 1] {
                        log::warn!("tabulated spectrum evaluated above its range at omega = {omega}; clamping");
                    }
                    return Ok(ys[n - 1]);
                }
                let k = xs.partition_point(|&x| x <= omega) - 1;
                let s = (omega - xs[k]) / (xs[k + 1] - xs[k]);
                Ok(ys[k] + s * (ys[k + 1] - ys[k]))
            }
        }
    }

    /// The same spectrum multiplied by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            NoiseSpectrum::Flat { s0 } => NoiseSpectrum::Flat { s0: s0 * factor },
            NoiseSpectrum::OneOverF { a_f } => NoiseSpectrum::OneOverF { a_f: a_f * factor.sqrt() },
            NoiseSpectrum::Dielectric { a_d, temperature } => {
                NoiseSpectrum::Dielectric { a_d: a_d * factor, temperature: *temperature }
            }
            NoiseSpectrum::Tabulated { omega, value } => NoiseSpectrum::Tabulated {
                omega: omega.clone(),
                value: value.iter().map(|v| v * factor).collect(),
            },
        }
    }
}

/// `|coth(ω/2T) + 1| / 2`: `n̄ + 1` for emission (ω > 0), `n̄` for
/// absorption (ω < 0). At zero temperature this is a unit step.
pub fn thermal_factor(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return if omega > 0.0 { 1.0 } else { 0.0 };
    }
    let x = omega / (2.0 * temperature);
    // coth(x) + 1 = 2 / (1 − e^{−2x})
    let v = 1.0 / (-(-2.0 * x).exp_m1());
    v.abs()
}

/// Symmetrized spectrum in the golden-rule normalization:
/// `[S(ω) + S(−ω)] / (4π)` for a two-sided spectrum `S`.
pub fn golden_rule_spectrum(spec: &NoiseSpectrum, omega: f64) -> Result<f64> {
    Ok((spec.eval(omega)? + spec.eval(-omega)?) / (4.0 * PI))
}

/// Control parameter a sensitivity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlParameter {
    NExt,
    PhiExt,
}

impl ControlParameter {
    pub fn name(&self) -> &'static str {
        match self {
            ControlParameter::NExt => "n_ext",
            ControlParameter::PhiExt => "phi_ext",
        }
    }

    fn get(&self, p: &CircuitParams) -> f64 {
        match self {
            ControlParameter::NExt => p.n_ext,
            ControlParameter::PhiExt => p.phi_ext,
        }
    }

    fn with(&self, p: &CircuitParams, value: f64) -> CircuitParams {
        let mut q = *p;
        match self {
            ControlParameter::NExt => q.n_ext = value,
            ControlParameter::PhiExt => q.phi_ext = value,
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityCoefficients {
    /// `∂ω_q/∂λ`.
    pub d_lambda_z: f64,
    /// `∂²ω_q/∂λ²`.
    pub second_derivative: f64,
    /// `∂²ω_q/∂λ² − D_⊥²/ω_q`.
    pub d_lambda2_z: f64,
    /// `2|⟨1|∂H/∂λ|0⟩|`.
    pub d_lambda_perp: f64,
    pub omega_q: f64,
    pub lambda_name: String,
}

/// First and second central differences at `x0` with a Richardson check
/// between steps `delta` and `delta/2`.
pub fn sensitivity_from_fn<F>(mut omega: F, x0: f64, delta: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {delta}")));
    }
    let w0 = omega(x0)?;
    let mut first = [0.0; 2];
    let mut second = [0.0; 2];
    for (k, h) in [delta, delta / 2.0].into_iter().enumerate() {
        let wp = omega(x0 + h)?;
        let wm = omega(x0 - h)?;
        first[k] = (wp - wm) / (2.0 * h);
        second[k] = (wp - 2.0 * w0 + wm) / (h * h);
    }
    let scale = w0.abs().max(1.0);
    let floor1 = 1e-9 * scale / delta;
    let floor2 = 1e-7 * scale / (delta * delta);
    if (first[0] - first[1]).abs() > 0.01 * first[1].abs() + floor1 {
        return Err(Error::NotConverged(format!(
            "first derivative changes from {} to {} when halving the step {delta}; reduce it",
            first[0], first[1]
        )));
    }
    if (second[0] - second[1]).abs() > 0.01 * second[1].abs() + floor2 {
        return Err(Error::NotConverged(format!(
            "second derivative changes from {} to {} when halving the step {delta}; reduce it",
            second[0], second[1]
        )));
    }
    Ok((first[1], second[1]))
}

fn perp_element(h_minus: &SymTridiagonal, h_plus: &SymTridiagonal, delta: f64, v0: &[f64], v1: &[f64]) -> f64 {
    let diff = SymTridiagonal {
        diag: h_plus.diag.iter().zip(&h_minus.diag).map(|(a, b)| (a - b) / (2.0 * delta)).collect(),
        off: h_plus.off.iter().zip(&h_minus.off).map(|(a, b)| (a - b) / (2.0 * delta)).collect(),
    };
    2.0 * diff.bilinear(v1, v0).abs()
}

/// Sensitivity of the qubit transition to a control parameter.
pub fn sensitivity(
    params: &CircuitParams,
    model: &CircuitModel,
    lambda: ControlParameter,
    delta: f64,
) -> Result<SensitivityCoefficients> {
    let x0 = lambda.get(params);
    let omega_q_at = |x: f64| -> Result<f64> {
        let spec = model.spectrum(&lambda.with(params, x), 2)?;
        Ok(spec.energies[1] - spec.energies[0])
    };
    let (d_z, d2) = sensitivity_from_fn(omega_q_at, x0, delta)?;

    let h0 = model.tridiagonal(params)?;
    let (energies, vectors) = h0.lowest(2)?;
    let omega_q = energies[1] - energies[0];
    let mut perp = [0.0; 2];
    for (k, h) in [delta, delta / 2.0].into_iter().enumerate() {
        let hp = model.tridiagonal(&lambda.with(params, x0 + h))?;
        let hm = model.tridiagonal(&lambda.with(params, x0 - h))?;
        perp[k] = perp_element(&hm, &hp, h, &vectors[0], &vectors[1]);
    }
    if (perp[0] - perp[1]).abs() > 0.01 * perp[1] + 1e-9 * omega_q.abs().max(1.0) / delta {
        return Err(Error::NotConverged(format!(
            "transverse coefficient changes from {} to {} when halving the step {delta}",
            perp[0], perp[1]
        )));
    }
    let d_perp = perp[1];
    Ok(SensitivityCoefficients {
        d_lambda_z: d_z,
        second_derivative: d2,
        d_lambda2_z: d2 - d_perp * d_perp / omega_q,
        d_lambda_perp: d_perp,
        omega_q,
        lambda_name: lambda.name().to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoldenRuleRates {
    pub gamma1: f64,
    pub gamma_phi: f64,
    pub gamma2: f64,
    pub t1: f64,
    pub t2: f64,
}

/// `Γ1 = π D_⊥² S(ω_q)`, `Γφ = π D_z² S(0)`, `Γ2 = Γφ + Γ1/2`.
///
/// `spec` is used as given; for a two-sided spectrum pass values through
/// [`golden_rule_spectrum`] first (see [`golden_rule_rates_two_sided`]).
pub fn golden_rule_rates(coeff: &SensitivityCoefficients, spec: &NoiseSpectrum, omega_q: f64) -> Result<GoldenRuleRates> {
    let s_q = spec.eval(omega_q)?;
    let s_0 = dephasing_level(coeff, spec, |s| s.eval(0.0))?;
    assemble(coeff, s_q, s_0)
}

/// Golden-rule rates for a two-sided spectrum, symmetrized as in
/// [`golden_rule_spectrum`].
pub fn golden_rule_rates_two_sided(
    coeff: &SensitivityCoefficients,
    spec: &NoiseSpectrum,
    omega_q: f64,
) -> Result<GoldenRuleRates> {
    let s_q = golden_rule_spectrum(spec, omega_q)?;
    let s_0 = dephasing_level(coeff, spec, |s| golden_rule_spectrum(s, 0.0))?;
    assemble(coeff, s_q, s_0)
}

fn dephasing_level<F>(coeff: &SensitivityCoefficients, spec: &NoiseSpectrum, eval0: F) -> Result<f64>
where
    F: Fn(&NoiseSpectrum) -> Result<f64>,
{
    if coeff.d_lambda_z == 0.0 {
        return Ok(0.0);
    }
    if spec.singular_at_zero() {
        return Err(Error::SingularDephasing { d_z: coeff.d_lambda_z });
    }
    eval0(spec)
}

fn assemble(coeff: &SensitivityCoefficients, s_q: f64, s_0: f64) -> Result<GoldenRuleRates> {
    let gamma1 = PI * coeff.d_lambda_perp * coeff.d_lambda_perp * s_q;
    let gamma_phi = PI * coeff.d_lambda_z * coeff.d_lambda_z * s_0;
    let DecoherenceTimes { gamma2, t1, t2, .. } = decoherence_times(gamma1, gamma_phi)?;
    Ok(GoldenRuleRates { gamma1, gamma_phi, gamma2, t1, t2 })
}

/// Coefficients with given values, for callers that know them analytically.
pub fn coefficients(d_z: f64, d_perp: f64, omega_q: f64) -> SensitivityCoefficients {
    SensitivityCoefficients {
        d_lambda_z: d_z,
        second_derivative: 0.0,
        d_lambda2_z: -d_perp * d_perp / omega_q,
        d_lambda_perp: d_perp,
        omega_q,
        lambda_name: "custom".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_spectra() {
        assert_eq!(NoiseSpectrum::flat(1.0).eval(123.0).unwrap(), 1.0);
        assert_abs_diff_eq!(NoiseSpectrum::one_over_f(1.0).eval(2.0 * PI).unwrap(), 1.0, epsilon = 1e-15);
        let omega = 3.0;
        let cold = NoiseSpectrum::dielectric(0.7, 0.0).eval(omega).unwrap();
        assert_abs_diff_eq!(cold, 0.7 * (omega / (2.0 * PI)).powi(2), epsilon = 1e-15);
        let nearly_cold = NoiseSpectrum::dielectric(0.7, 1e-3).eval(omega).unwrap();
        assert_abs_diff_eq!(nearly_cold, cold, epsilon = 1e-12);
        assert_eq!(NoiseSpectrum::dielectric(0.7, 0.0).eval(-omega).unwrap(), 0.0);
    }

    #[test]
    fn one_over_f_is_singular_at_zero() {
        let s = NoiseSpectrum::one_over_f(0.3);
        assert!(s.singular_at_zero());
        assert!(matches!(s.eval(0.0), Err(Error::SingularSpectrum { .. })));
        for w in [-5.0, -0.01, 1e-6, 42.0] {
            let v = s.eval(w).unwrap() * (w / (2.0 * PI)).abs();
            assert_abs_diff_eq!(v, 0.09, epsilon = 1e-15);
        }
    }

    #[test]
    fn thermal_factor_detailed_balance() {
        let (w, t) = (2.0, 0.8);
        let emission = thermal_factor(w, t);
        let absorption = thermal_factor(-w, t);
        assert_abs_diff_eq!(absorption / emission, (-w / t).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(emission - absorption, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let s = NoiseSpectrum::tabulated(vec![-1.0, 0.0, 2.0], vec![0.5, 1.0, 3.0]).unwrap();
        assert_abs_diff_eq!(s.eval(1.0).unwrap(), 2.0);
        assert_abs_diff_eq!(s.eval(-0.5).unwrap(), 0.75);
        assert_eq!(s.eval(10.0).unwrap(), 3.0);
        assert_eq!(s.eval(-10.0).unwrap(), 0.5);
        assert!(NoiseSpectrum::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(NoiseSpectrum::tabulated(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(NoiseSpectrum::tabulated(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn quadratic_test_function() {
        let (a, b) = (3.0, 0.25);
        let (d1, d2) = sensitivity_from_fn(|x| Ok(a + b * x * x), 0.0, 1e-3).unwrap();
        assert_abs_diff_eq!(d1, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(d2, 2.0 * b, epsilon = 1e-4);
    }

    #[test]
    fn oversized_step_rejected() {
        let res = sensitivity_from_fn(|x| Ok((5.0 * x).sin()), 0.3, 0.5);
        assert!(matches!(res, Err(Error::NotConverged(_))));
        assert!(sensitivity_from_fn(|x| Ok(x), 0.0, 0.0).is_err());
    }

    #[test]
    fn sweet_spot_has_no_first_order_sensitivity() {
        let p = CircuitParams::transmon(1.0, 5.0, 0.0);
        let model = CircuitModel::Charge { ncut: 20 };
        let s = sensitivity(&p, &model, ControlParameter::NExt, 1e-3).unwrap();
        assert!(s.d_lambda_z.abs() < 1e-8, "{}", s.d_lambda_z);
        assert!(s.d_lambda_perp > 0.0);
    }

    #[test]
    fn charge_dispersion_extremum_at_half_integer() {
        let model = CircuitModel::Charge { ncut: 20 };
        let at = |n: f64| {
            sensitivity(&CircuitParams::transmon(1.0, 5.0, n), &model, ControlParameter::NExt, 1e-3)
                .unwrap()
                .d_lambda_z
                .abs()
        };
        let centre = at(0.5);
        assert!(centre < 1e-8);
        assert!(at(0.45) > centre && at(0.55) > centre);
        assert!(at(0.25) > at(0.45));
    }

    #[test]
    fn transverse_coefficient_matches_charge_matrix_element() {
        // ∂H/∂N_ext = −8E_C (n − N_ext): D_⊥ = 2|⟨1|∂H|0⟩|.
        let p = CircuitParams::transmon(1.0, 10.0, 0.2);
        let model = CircuitModel::Charge { ncut: 15 };
        let s = sensitivity(&p, &model, ControlParameter::NExt, 1e-3).unwrap();
        let spec = model.spectrum(&p, 2).unwrap();
        let mut element = 0.0;
        for k in 0..31 {
            let n = k as f64 - 15.0;
            element += spec.states[(k, 1)].re * (-8.0 * (n - 0.2)) * spec.states[(k, 0)].re;
        }
        assert_abs_diff_eq!(s.d_lambda_perp, 2.0 * element.abs(), epsilon = 1e-6);
    }

    #[test]
    fn golden_rule_examples() {
        let r = golden_rule_rates(&coefficients(0.0, 1.0, 5.0), &NoiseSpectrum::flat(1.0 / PI), 5.0).unwrap();
        assert_abs_diff_eq!(r.gamma1, 1.0, epsilon = 1e-15);
        assert_eq!(r.gamma_phi, 0.0);
        assert_abs_diff_eq!(r.gamma2, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.t2, 2.0 * r.t1, epsilon = 1e-12);

        // Γ1 = 2, Γφ = 0.5
        let c = coefficients((0.5 / PI).sqrt(), (2.0 / PI).sqrt(), 5.0);
        let r = golden_rule_rates(&c, &NoiseSpectrum::flat(1.0), 5.0).unwrap();
        assert_abs_diff_eq!(r.gamma2, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn golden_rule_singular_dephasing() {
        let c = coefficients(0.1, 1.0, 5.0);
        let err = golden_rule_rates(&c, &NoiseSpectrum::one_over_f(1e-3), 5.0).unwrap_err();
        assert!(matches!(err, Error::SingularDephasing { .. }));
        let ok = golden_rule_rates(&coefficients(0.0, 1.0, 5.0), &NoiseSpectrum::one_over_f(1e-3), 5.0).unwrap();
        assert_eq!(ok.gamma_phi, 0.0);
    }

    #[test]
    fn two_sided_symmetrization() {
        let spec = NoiseSpectrum::flat(2.0);
        let r = golden_rule_rates_two_sided(&coefficients(0.0, 2.0, 3.0), &spec, 3.0).unwrap();
        // π · 4 · (2 + 2)/(4π) = 4
        assert_abs_diff_eq!(r.gamma1, 4.0, epsilon = 1e-12);
    }
}
