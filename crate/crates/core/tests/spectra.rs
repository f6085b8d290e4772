use nalgebra::DMatrix;
use proptest::prelude::*;
use sqdyn::circuits::{
    cpb_spectrum, fluxonium_spectrum, jc_coupling_matrix, multilevel_coupling, schrieffer_wolff, CircuitModel, CircuitParams,
    PhaseGrid,
};
use sqdyn::floquet::{floquet_couplings, floquet_modes, floquet_rates, fold_quasienergy};
use sqdyn::lindblad::{Drive, Hamiltonian};
use sqdyn::noise::{coefficients, golden_rule_rates, sensitivity, ControlParameter, NoiseSpectrum};
use sqdyn::{c, eigh, ops, C64};

fn sorted_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let (mut e, _) = eigh(m);
    e.sort_by(f64::total_cmp);
    e
}

/// Charge-basis matrix assembled directly, diagonalized densely.
fn dense_cpb(e_c: f64, e_j: f64, n_ext: f64, ncut: i64) -> Vec<f64> {
    let n = (2 * ncut + 1) as usize;
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let q = i as f64 - ncut as f64 - n_ext;
            c(4.0 * e_c * q * q, 0.0)
        } else if i.abs_diff(j) == 1 {
            c(-e_j / 2.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    sorted_eigenvalues(&m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn charge_basis_agrees_with_dense_diagonalization(
        e_c in 0.1..2.0f64,
        ratio in 0.5..60.0f64,
        n_ext in -1.0..1.0f64,
    ) {
        let e_j = ratio * e_c;
        let ncut = 15;
        let s = cpb_spectrum(&CircuitParams::transmon(e_c, e_j, n_ext), ncut, 4).unwrap();
        let dense = dense_cpb(e_c, e_j, n_ext, ncut as i64);
        for k in 0..4 {
            prop_assert!((s.energies[k] - dense[k]).abs() < 1e-9 * dense[k].abs().max(e_j));
        }
    }

    #[test]
    fn quasienergies_fold_into_zone(x in -100.0..100.0f64, omega in 0.1..10.0f64) {
        let f = fold_quasienergy(x, omega);
        prop_assert!(f >= -omega / 2.0 && f < omega / 2.0);
        let k = ((x - f) / omega).round();
        prop_assert!((x - f - k * omega).abs() < 1e-9 * x.abs().max(1.0));
    }

    #[test]
    fn jc_manifolds_match_two_by_two_blocks(
        omega_r in 3.0..7.0f64,
        omega_q in 3.0..7.0f64,
        g in 0.01..0.3f64,
    ) {
        // Excitation number is conserved; each manifold {|g,n⟩, |e,n−1⟩}
        // is a 2×2 block with off-diagonal g√n.
        let nmax = 5;
        let h = multilevel_coupling(&[0.0, omega_q], &jc_coupling_matrix(g), omega_r, nmax).unwrap();
        let numeric = sorted_eigenvalues(h.matrix());
        let mut expected = vec![0.0, omega_q + nmax as f64 * omega_r];
        for n in 1..=nmax {
            let nf = n as f64;
            let a = nf * omega_r;
            let b = omega_q + (nf - 1.0) * omega_r;
            let mean = 0.5 * (a + b);
            let split = (0.25 * (a - b).powi(2) + g * g * nf).sqrt();
            expected.push(mean - split);
            expected.push(mean + split);
        }
        expected.sort_by(f64::total_cmp);
        for (x, y) in numeric.iter().zip(&expected) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn fluxonium_without_junction_is_harmonic() {
    let (e_c, e_l) = (1.0, 0.5);
    let grid = PhaseGrid::new(-12.0, 12.0, 4001);
    let s = fluxonium_spectrum(&CircuitParams::fluxonium(e_c, 0.0, e_l, 0.0), &grid, 5).unwrap();
    let w = (8.0 * e_l * e_c).sqrt();
    for (k, e) in s.energies.iter().enumerate() {
        let exact = w * (k as f64 + 0.5);
        // second-order finite differences
        assert!((e - exact).abs() < 2e-4 * exact, "level {k}: {e} vs {exact}");
    }
}

#[test]
fn charge_sensitivity_near_degeneracy() {
    // With E_J ≪ E_C only the charge states 0 and 1 matter near n = ½:
    // ω(n) ≈ √((4E_C(1 − 2n))² + E_J²).
    let (e_c, e_j) = (1.0, 0.05);
    let params = CircuitParams::transmon(e_c, e_j, 0.5);
    let coeff = sensitivity(&params, &CircuitModel::Charge { ncut: 10 }, ControlParameter::NExt, 1e-4).unwrap();
    assert!(coeff.d_lambda_z.abs() < 1e-6);
    let curvature = 64.0 * e_c * e_c / e_j;
    assert!((coeff.second_derivative - curvature).abs() < 1e-2 * curvature, "{}", coeff.second_derivative);
    assert!((coeff.d_lambda_perp - 8.0 * e_c).abs() < 1e-2 * 8.0 * e_c, "{}", coeff.d_lambda_perp);
    assert!((coeff.omega_q - e_j).abs() < 1e-2 * e_j);
}

#[test]
fn flat_spectrum_golden_rule() {
    let s0 = 0.02;
    let r = golden_rule_rates(&coefficients(0.3, 1.2, 5.0), &NoiseSpectrum::flat(s0), 5.0).unwrap();
    let pi = std::f64::consts::PI;
    assert!((r.gamma1 - pi * 1.44 * s0).abs() < 1e-15);
    assert!((r.gamma_phi - pi * 0.09 * s0).abs() < 1e-15);
    assert!((r.gamma2 - (r.gamma_phi + 0.5 * r.gamma1)).abs() < 1e-15);
}

#[test]
fn longitudinal_drive_leaves_quasienergies_unchanged() {
    // A drive commuting with the static part only adds a periodic phase.
    let wq = 1.7;
    let h0 = ops::sigma_z().scaled(c(wq / 2.0, 0.0));
    let h = Hamiltonian::driven(h0, vec![(ops::sigma_z(), Drive::cosine(0.9, 2.3))]).unwrap();
    let period = h.period().unwrap();
    let basis = floquet_modes(&h, period, 256).unwrap();
    let omega = basis.omega();
    let mut expected = [fold_quasienergy(-wq / 2.0, omega), fold_quasienergy(wq / 2.0, omega)];
    expected.sort_by(f64::total_cmp);
    let mut got = basis.quasienergies().to_vec();
    got.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn floquet_rates_are_gauge_invariant() {
    let h0 = ops::sigma_z().scaled(c(0.5, 0.0));
    let h = Hamiltonian::driven(h0, vec![(ops::sigma_x(), Drive::cosine(0.8, 1.3))]).unwrap();
    let basis = floquet_modes(&h, h.period().unwrap(), 256).unwrap();
    let spectrum = NoiseSpectrum::dielectric(0.2, 0.7);
    let reference = floquet_rates(&floquet_couplings(&basis, &ops::sigma_x(), 16).unwrap(), &spectrum).unwrap();
    for (alpha, n) in [(0, 1), (1, -1), (0, 2)] {
        let shifted = basis.shifted(alpha, n);
        let r = floquet_rates(&floquet_couplings(&shifted, &ops::sigma_x(), 16).unwrap(), &spectrum).unwrap();
        for (a, b) in [
            (r.gamma_plus, reference.gamma_plus),
            (r.gamma_minus, reference.gamma_minus),
            (r.gamma_phi, reference.gamma_phi),
        ] {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1e-12), "shift ({alpha}, {n}): {a} vs {b}");
        }
    }
}

#[test]
fn dispersive_shift_matches_exact_jc_at_large_detuning() {
    // The pull of the dressed cavity frequency depends on the qubit state
    // by 2χ with χ = g²/Δ, up to fourth order.
    let (wr, wq, g) = (6.0, 7.0, 0.04);
    let h = multilevel_coupling(&[0.0, wq], &jc_coupling_matrix(g), wr, 3).unwrap();
    let e = sorted_eigenvalues(h.matrix());
    // lowest states: |g,0⟩, |g,1⟩~, |e,0⟩~, |g,2⟩~, |e,1⟩~
    let (g0, g1, e0, e1) = (e[0], e[1], e[2], e[4]);
    let exact_chi = 0.5 * ((e1 - e0) - (g1 - g0));
    let dm = schrieffer_wolff(&[0.0, wq], &jc_coupling_matrix(g), wr, 10.0).unwrap();
    let delta = wq - wr;
    assert!((dm.chi_qubit - exact_chi).abs() < 4.0 * g.powi(4) / delta.powi(3));
}
