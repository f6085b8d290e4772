use proptest::prelude::*;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use sqdyn::analysis::{bloch_vector, fit_t1, fit_t2_ramsey};
use sqdyn::inout::{
    dispersive_readout_curve, mean_cavity_response, output_field, reflection, steady_state_amplitude, CavityPort, DriveTone,
};
use sqdyn::ode::linspace;
use sqdyn::{c, DensityMatrix, Ket, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_decay_is_recovered(rate in 0.2..3.0f64, amp in 0.3..1.0f64, offset in -0.2..0.2f64) {
        let t = linspace(0.0, 6.0 / rate, 80);
        let y: Vec<f64> = t.iter().map(|t| amp * (-rate * t).exp() + offset).collect();
        let fit = fit_t1(&t, &y).unwrap();
        prop_assert!((fit.rate - rate).abs() < 1e-6 * rate);
        prop_assert!((fit.amplitude - amp).abs() < 1e-6);
        prop_assert!((fit.offset - offset).abs() < 1e-6);
    }

    #[test]
    fn exact_fringe_is_recovered(rate in 0.2..1.0f64, freq in 2.0..8.0f64, phase in -1.0..1.0f64) {
        let t = linspace(0.0, 5.0 / rate, 400);
        let y: Vec<f64> = t.iter().map(|t| 0.5 * (-rate * t).exp() * (freq * t + phase).cos() + 0.5).collect();
        let fit = fit_t2_ramsey(&t, &y, None).unwrap();
        prop_assert!((fit.rate - rate).abs() < 1e-6 * rate, "rate {} vs {}", fit.rate, rate);
        prop_assert!((fit.frequency.unwrap() - freq).abs() < 1e-6 * freq);
    }

    #[test]
    fn reflection_is_lossless_and_forgets_initial_amplitude(
        kappa in 0.05..2.0f64,
        detune in -3.0..3.0f64,
        a0 in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let port = CavityPort::new(5.0, kappa).unwrap();
        let r = reflection(&port, 5.0 + detune);
        prop_assert!((r.norm() - 1.0).abs() < 1e-12);

        let drive = DriveTone::new(c(0.3, -0.1), 5.0 + detune).unwrap();
        let grid = linspace(0.0, 60.0 / kappa, 3);
        let resp = mean_cavity_response(&port, &drive, &grid, c(a0.0, a0.1)).unwrap();
        let last = *resp.amplitudes.last().unwrap();
        prop_assert!((last - resp.steady_state).norm() < 1e-9);
        // output = r · input in steady state
        let out = output_field(drive.beta_in, resp.steady_state, kappa);
        prop_assert!((out - r * drive.beta_in).norm() < 1e-12);
    }

    #[test]
    fn readout_separation_has_closed_form(kappa in 0.1..2.0f64, ratio in 0.01..2.0f64) {
        // r(δ) = (iδ − κ/2)/(iδ + κ/2) has phase π − 2·atan(2δ/κ), δ the
        // cavity-minus-drive detuning of the pulled resonance.
        let chi = ratio * kappa;
        let port = CavityPort::new(6.0, kappa).unwrap();
        let sweep = linspace(6.0 - 4.0 * kappa, 6.0 + 4.0 * kappa, 8001);
        let curve = dispersive_readout_curve(&port, chi, &sweep).unwrap();
        let pi = std::f64::consts::PI;
        let mut best = 0.0f64;
        for (k, w) in sweep.iter().enumerate() {
            let phase = |d: f64| pi - 2.0 * (2.0 * d / kappa).atan();
            let diff = phase(6.0 + chi - w) - phase(6.0 - chi - w);
            let wrapped = (diff + pi).rem_euclid(2.0 * pi) - pi;
            prop_assert!((curve.phase_separation[k] - wrapped.abs()).abs() < 1e-9);
            best = best.max(wrapped.abs());
        }
        prop_assert!((curve.max_separation - best).abs() < 1e-12);
        // Below χ = κ/2 the peak sits at the bare frequency.
        if chi <= kappa / 2.0 {
            prop_assert!((curve.max_separation - 4.0 * (2.0 * chi / kappa).atan()).abs() < 1e-9);
        }
    }
}

#[test]
fn noisy_fits_agree_within_standard_errors() {
    let normal = Normal::new(0.0, 0.01).unwrap();
    let t = linspace(0.0, 8.0, 120);
    let mut misses = 0;
    let trials = 40;
    for seed in 0..trials {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = t.iter().map(|t| 0.9 * (-0.7 * t).exp() + 0.05 + normal.sample(&mut rng)).collect();
        let fit = fit_t1(&t, &y).unwrap();
        let se = fit.std_error("rate").unwrap();
        assert!(se > 0.0 && se < 0.05);
        if (fit.rate - 0.7).abs() > 3.0 * se {
            misses += 1;
        }
    }
    // a 3σ interval misses 0.3% of the time; allow a couple in 40
    assert!(misses <= 2, "{misses} of {trials} fits outside 3 SE");
}

#[test]
fn constant_signal_is_rejected() {
    let t = linspace(0.0, 5.0, 50);
    assert!(fit_t1(&t, &vec![0.4; 50]).is_err());
    assert!(fit_t2_ramsey(&t, &vec![0.4; 50], None).is_err());
    assert!(fit_t1(&t[..4], &[1.0, 0.5, 0.25, 0.12]).is_err());
}

#[test]
fn bloch_vector_of_pure_states() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cases: [([C64; 2], [f64; 3]); 4] = [
        ([c(1.0, 0.0), c(0.0, 0.0)], [0.0, 0.0, -1.0]),
        ([c(0.0, 0.0), c(1.0, 0.0)], [0.0, 0.0, 1.0]),
        ([c(s, 0.0), c(s, 0.0)], [1.0, 0.0, 0.0]),
        ([c(s, 0.0), c(0.0, s)], [0.0, 0.0, 0.0]),
    ];
    for (amps, expected) in &cases[..3] {
        let rho = DensityMatrix::from_ket(&Ket::from_amplitudes(amps).unwrap()).unwrap();
        let b = bloch_vector(&rho).unwrap();
        for k in 0..3 {
            assert!((b[k] - expected[k]).abs() < 1e-14, "{amps:?}: {b:?}");
        }
    }
    let rho = DensityMatrix::from_ket(&Ket::from_amplitudes(&cases[3].0).unwrap()).unwrap();
    let b = bloch_vector(&rho).unwrap();
    assert!((b[0].abs() + b[2].abs()) < 1e-14 && (b[1].abs() - 1.0).abs() < 1e-14);
}

#[test]
fn resonant_drive_gives_negative_amplitude() {
    let port = CavityPort::new(4.0, 0.5).unwrap();
    let drive = DriveTone::new(c(1.0, 0.0), 4.0).unwrap();
    let ss = steady_state_amplitude(&port, &drive);
    assert!((ss - c(-2.0 / 0.5f64.sqrt(), 0.0)).norm() < 1e-12);
    assert!((reflection(&port, 4.0) + c(1.0, 0.0)).norm() < 1e-15);
}
