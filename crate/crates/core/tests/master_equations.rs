use nalgebra::DMatrix;
use proptest::prelude::*;
use sqdyn::analysis::{trace_distance_matrices, trace_distance};
use sqdyn::lindblad::{solve_lindblad, LindbladModel, SolverOptions};
use sqdyn::noise::NoiseSpectrum;
use sqdyn::nonmarkov::{nonmarkov_dephasing, solve_pmme, Kernel, PMMEModel};
use sqdyn::ode::{linspace, OdeOptions};
use sqdyn::redfield::{br_tensor, solve_br, CouplingSpec, SecularCutoff};
use sqdyn::{c, expm, hermiticity_deviation, liouvillian, ops, unvec, vec_of, Channel, DensityMatrix, HilbertSpace, Ket, Operator, C64};

fn hermitian(n: usize, entries: &[(f64, f64)]) -> DMatrix<C64> {
    let m = DMatrix::from_fn(n, n, |i, j| {
        let (re, im) = entries[i * n + j];
        c(re, im)
    });
    (&m + m.adjoint()) * c(0.5, 0.0)
}

fn density(n: usize, entries: &[(f64, f64)]) -> DMatrix<C64> {
    let a = DMatrix::from_fn(n, n, |i, j| {
        let (re, im) = entries[i * n + j];
        c(re, im)
    });
    let p = &a * a.adjoint() + DMatrix::identity(n, n) * c(1e-3, 0.0);
    let tr = p.trace();
    p / tr
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        n in 2usize..5,
        seed in any::<u64>(),
        rates in prop::collection::vec(0.0..2.0f64, 2),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |k: usize| -> Vec<(f64, f64)> { (0..k).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect() };
        let space = HilbertSpace::qudit(n);
        let h = Operator::new(hermitian(n, &draw(n * n)), space.clone()).unwrap();
        let l1 = Operator::new(DMatrix::from_fn(n, n, |_, _| { let (a, b) = draw(1)[0]; c(a, b) }), space.clone()).unwrap();
        let l2 = Operator::new(hermitian(n, &draw(n * n)), space.clone()).unwrap();
        let chans = vec![Channel::new(l1, rates[0]).unwrap(), Channel::new(l2, rates[1]).unwrap()];
        let lv = liouvillian(&h, &chans).unwrap();
        prop_assert!(lv.trace_annihilation_error() < 1e-12 * lv.matrix().norm().max(1.0));

        let rho = density(n, &draw(n * n));
        let out = lv.apply(&rho);
        prop_assert!(out.trace().norm() < 1e-12 * lv.matrix().norm().max(1.0));
        prop_assert!(hermiticity_deviation(&out) < 1e-12 * lv.matrix().norm().max(1.0));

        // exp(Lt) keeps a valid state
        let rho_t = unvec(&(lv.exp(0.7) * vec_of(&rho)), n);
        prop_assert!((rho_t.trace() - c(1.0, 0.0)).norm() < 1e-10);
        let sym = (&rho_t + rho_t.adjoint()) * c(0.5, 0.0);
        let (evals, _) = sqdyn::eigh(&sym);
        prop_assert!(evals.iter().all(|&e| e > -1e-10));
    }

    #[test]
    fn vec_unvec_round_trip(n in 1usize..6, e in entries(5)) {
        let m = DMatrix::from_fn(n, n, |i, j| { let (a, b) = e[i * 5 + j]; c(a, b) });
        prop_assert_eq!(unvec(&vec_of(&m), n), m);
    }

    #[test]
    fn trace_distance_is_a_metric(a in entries(3), b in entries(3), d in entries(3)) {
        let (r, s, t) = (density(3, &a), density(3, &b), density(3, &d));
        let rs = trace_distance_matrices(&r, &s);
        let st = trace_distance_matrices(&s, &t);
        let rt = trace_distance_matrices(&r, &t);
        prop_assert!(rt <= rs + st + 1e-12);
        prop_assert!((rs - trace_distance_matrices(&s, &r)).abs() < 1e-12);
        prop_assert!(rs >= 0.0 && rs <= 1.0 + 1e-12);
        prop_assert!(trace_distance_matrices(&r, &r) < 1e-12);
    }

    #[test]
    fn flat_spectrum_redfield_is_lindblad(
        n in 2usize..4,
        levels in prop::collection::vec(0.5..3.0f64, 3),
        coupling in entries(3),
        s0 in 0.01..0.3f64,
    ) {
        // Nondegenerate spectrum, no secular truncation: the tensor must
        // reduce to a single Lindblad channel with the coupling operator.
        let mut e = vec![0.0];
        for k in 1..n {
            e.push(e[k - 1] + levels[k - 1]);
        }
        let space = HilbertSpace::qudit(n);
        let h = Operator::diagonal(&space, &e).unwrap();
        let a = Operator::new(hermitian(n, &coupling[..n * n]), space.clone()).unwrap();
        let tensor = br_tensor(&h, &CouplingSpec::single(a.clone(), NoiseSpectrum::flat(s0)).unwrap(), SecularCutoff::None).unwrap();
        prop_assert!(tensor.trace_error() < 1e-12);

        let lind = LindbladModel::new(h, vec![Channel::new(a, s0).unwrap()]).unwrap();
        let psi: Vec<C64> = (0..n).map(|k| c(1.0 + k as f64, 0.3 * k as f64)).collect();
        let rho0 = DensityMatrix::from_ket(&Ket::from_amplitudes(&psi).unwrap().normalized().unwrap()).unwrap();
        let grid = linspace(0.0, 4.0, 21);
        let opts = SolverOptions { ode: OdeOptions::tight(), ..SolverOptions::default() };
        let br = solve_br(&tensor, &rho0, &grid, &opts).unwrap();
        let li = solve_lindblad(&lind, &rho0, &grid, &opts).unwrap();
        for (x, y) in br.states.iter().zip(&li.states) {
            prop_assert!(trace_distance(x, y).unwrap() < 1e-7);
        }
    }
}

#[test]
fn lindblad_matches_matrix_exponential() {
    let h = Operator::from_real_rows(&[&[0.0, 0.4, 0.0], &[0.4, 1.1, 0.2], &[0.0, 0.2, 2.5]]).unwrap();
    let chans = vec![
        Channel::new(ops::destroy(3), 0.3).unwrap(),
        Channel::new(ops::number(3), 0.1).unwrap(),
    ];
    let lv = liouvillian(&h, &chans).unwrap();
    let model = LindbladModel::new(h, chans).unwrap();
    let rho0 = DensityMatrix::basis(&HilbertSpace::qudit(3), 2);
    let grid = linspace(0.0, 6.0, 31);
    let opts = SolverOptions { ode: OdeOptions::tight(), ..SolverOptions::default() };
    let res = solve_lindblad(&model, &rho0, &grid, &opts).unwrap();
    for (t, rho) in grid.iter().zip(&res.states) {
        let exact = unvec(&(expm(&(lv.matrix() * c(*t, 0.0))) * vec_of(rho0.matrix())), 3);
        assert!(trace_distance_matrices(rho.matrix(), &exact) < 1e-8, "t = {t}");
    }
}

/// Exact solution for the normalized exponential kernel: the memory
/// integral obeys its own linear ODE, so the pair (state, memory) evolves
/// under one block generator.
fn pmme_oracle(l0: &DMatrix<C64>, l1: &DMatrix<C64>, gamma: f64, rho0: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let d = l0.nrows();
    let l = l0 + l1;
    let id = DMatrix::<C64>::identity(d, d);
    let mut block = DMatrix::<C64>::zeros(2 * d, 2 * d);
    block.view_mut((0, 0), (d, d)).copy_from(l0);
    block.view_mut((0, d), (d, d)).copy_from(l1);
    block.view_mut((d, 0), (d, d)).copy_from(&(&id * c(gamma, 0.0)));
    block.view_mut((d, d), (d, d)).copy_from(&(l - &id * c(gamma, 0.0)));
    let mut x0 = nalgebra::DVector::<C64>::zeros(2 * d);
    x0.rows_mut(0, d).copy_from(&vec_of(rho0));
    let x = expm(&(block * c(t, 0.0))) * x0;
    unvec(&x.rows(0, d).into_owned(), rho0.nrows())
}

#[test]
fn pmme_exponential_kernel_matches_auxiliary_ode() {
    let gamma = 2.0;
    let h = ops::sigma_x().scaled(c(0.5, 0.0));
    let l0 = liouvillian(&h, &[Channel::new(ops::sigma_minus(), 0.4).unwrap()]).unwrap();
    let l1 = nonmarkov_dephasing(0.8).unwrap();
    let model = PMMEModel::new(l0.clone(), l1.clone(), Kernel::NormalizedExponential { gamma }).unwrap();
    let rho0 = DensityMatrix::from_ket(&Ket::plus()).unwrap();
    let t_end = 3.0;

    let err_at = |dt: f64| {
        let points = (t_end / dt).round() as usize + 1;
        let grid = linspace(0.0, t_end, points);
        let res = solve_pmme(&model, &rho0, &grid, &SolverOptions::default()).unwrap();
        grid.iter()
            .zip(&res.states)
            .step_by((points - 1) / 30)
            .map(|(t, rho)| trace_distance_matrices(rho.matrix(), &pmme_oracle(l0.matrix(), l1.matrix(), gamma, rho0.matrix(), *t)))
            .fold(0.0, f64::max)
    };
    let coarse = err_at(0.01);
    let fine = err_at(0.005);
    assert!(fine < 1e-4, "error {fine:.3e}");
    // second-order scheme
    assert!(coarse / fine > 3.0, "ratio {}", coarse / fine);
}

#[test]
fn pmme_without_memory_is_markovian() {
    let l0 = liouvillian(&ops::sigma_z().scaled(c(0.5, 0.0)), &[Channel::new(ops::sigma_minus(), 1.0).unwrap()]).unwrap();
    let l1 = nonmarkov_dephasing(0.0).unwrap();
    let model = PMMEModel::new(l0.clone(), l1, Kernel::Exponential { gamma: 1.0 }).unwrap();
    let rho0 = DensityMatrix::from_ket(&Ket::plus()).unwrap();
    let grid = linspace(0.0, 2.0, 201);
    let res = solve_pmme(&model, &rho0, &grid, &SolverOptions::default()).unwrap();
    for (t, rho) in grid.iter().zip(&res.states) {
        let exact = unvec(&(l0.exp(*t) * vec_of(rho0.matrix())), 2);
        assert!(trace_distance_matrices(rho.matrix(), &exact) < 1e-5);
    }
}
