//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use sqdyn::analysis::{fit_t2_ramsey, trace_distance, trace_distance_matrices};
use sqdyn::circuits::{
    cpb_spectrum, fluxonium_spectrum, jc_coupling_matrix, multilevel_coupling, schrieffer_wolff, CircuitParams,
    PhaseGrid, DEFAULT_DISPERSIVE_FACTOR,
};
use sqdyn::floquet::{floquet_couplings, floquet_modes, floquet_rates, fold_quasienergy, integrate_ket};
use sqdyn::inout::{photon_loss_rate, reflection, CavityPort};
use sqdyn::lindblad::{qubit_channels, solve_lindblad, Drive, Hamiltonian, LindbladModel, SolverOptions};
use sqdyn::mcwf::{ensemble_average, JumpModel, TrajectoryOptions};
use sqdyn::noise::{coefficients, golden_rule_rates_two_sided, NoiseSpectrum};
use sqdyn::nonmarkov::{nonmarkov_dephasing, solve_pmme, Kernel, PMMEModel};
use sqdyn::ode::{linspace, OdeOptions};
use sqdyn::redfield::{br_tensor, solve_br, CouplingSpec, SecularCutoff};
use sqdyn::rng::{standard_normal, stream};
use sqdyn::stochastic::{par_paths, solve_sme_z, solve_sse_z, uniform_grid, SmeScheme, WienerPath};
use sqdyn::{c, liouvillian, ops, unvec, vec_of, Channel, DensityMatrix, HilbertSpace, Ket, Operator, C64};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn zero_qubit() -> Operator {
    Operator::zeros(&HilbertSpace::qubit())
}

fn c1_amplitude_damping() -> Outcome {
    let start = Instant::now();
    let model = LindbladModel::new(zero_qubit(), vec![Channel::new(ops::sigma_minus(), 1.0).map_err(fail)?])
        .map_err(fail)?;
    let grid = linspace(0.0, 5.0, 501);
    let rho0 = DensityMatrix::basis(&HilbertSpace::qubit(), 1);
    let res = solve_lindblad(&model, &rho0, &grid, &SolverOptions::default()).map_err(fail)?;
    let err = res
        .population(1)
        .iter()
        .zip(&grid)
        .map(|(p, t)| (p - (-t).exp()).abs())
        .fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    check(err <= 1e-6 && elapsed < 1.0, format!("max |P_e - e^-t| = {err:.3e}, runtime {elapsed:.3} s"))
}

fn c2_dephasing_closure() -> Outcome {
    let model = LindbladModel::new(zero_qubit(), qubit_channels(1.0, 0.5).map_err(fail)?).map_err(fail)?;
    let grid = linspace(0.0, 5.0, 201);
    let rho0 = DensityMatrix::from_ket(&Ket::plus()).map_err(fail)?;
    let opts = SolverOptions::with_observables(vec![("sx".into(), ops::sigma_x())]);
    let res = solve_lindblad(&model, &rho0, &grid, &opts).map_err(fail)?;
    let sx = res.real_series("sx").unwrap();
    let fit = fit_t2_ramsey(&grid, &sx, None).map_err(fail)?;
    let rel = (fit.rate - 1.0).abs();
    check(rel <= 0.01, format!("fitted coherence decay rate {:.6} (expected 1.0, rel. err {rel:.2e})", fit.rate))
}

/// Asymptotic Kolmogorov distribution tail `P(√n D > λ)`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn c3_trajectory_equivalence() -> Outcome {
    let n = 5000;
    let t_end = 10.0;
    let grid = linspace(0.0, t_end, 101);
    let jm = JumpModel::new(zero_qubit(), vec![ops::sigma_minus()]).map_err(fail)?;
    let psi0 = Ket::basis(&HilbertSpace::qubit(), 1);
    let opts = TrajectoryOptions { keep_jumps: true, ..Default::default() };
    let ens = ensemble_average(&jm, &psi0, &grid, n, 20240611, &opts).map_err(fail)?;
    let lind = solve_lindblad(
        &jm.to_lindblad().map_err(fail)?,
        &DensityMatrix::basis(&HilbertSpace::qubit(), 1),
        &grid,
        &SolverOptions::default(),
    )
    .map_err(fail)?;
    let mut dist = 0.0f64;
    for (a, b) in ens.states.iter().zip(&lind.states) {
        dist = dist.max(trace_distance(a, b).map_err(fail)?);
    }
    let bound = 5.0 / (n as f64).sqrt();

    // First-jump times, right-censored at t_end.
    let mut times: Vec<f64> = ens.jumps.iter().filter_map(|tj| tj.jumps.first().map(|j| j.time)).collect();
    times.sort_by(f64::total_cmp);
    let cdf = |t: f64| 1.0 - (-t).exp();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let f = cdf(t);
        d = d.max((i as f64 + 1.0) / nf - f).max(f - i as f64 / nf);
    }
    d = d.max((times.len() as f64 / nf - cdf(t_end)).abs());
    let sq = nf.sqrt();
    let p = kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d);
    check(
        dist <= bound && p > 0.01 && ens.jumps.len() == n,
        format!(
            "max trace distance {dist:.4} (bound {bound:.4}); KS D = {d:.4}, p = {p:.3} over {} jumps",
            times.len()
        ),
    )
}

fn random_hermitian(n: usize, seed: u64) -> DMatrix<C64> {
    let mut rng = stream(seed, 0);
    let a = DMatrix::from_fn(n, n, |_, _| c(standard_normal(&mut rng), standard_normal(&mut rng)));
    (&a + a.adjoint()) * c(0.5, 0.0)
}

fn c4_redfield_flat() -> Outcome {
    let wq = 1.0;
    let s0 = 0.05;
    let h = ops::sigma_z().scaled(c(wq / 2.0, 0.0));
    let spec = CouplingSpec::single(ops::sigma_x(), NoiseSpectrum::flat(s0)).map_err(fail)?;
    let tensor = br_tensor(&h, &spec, SecularCutoff::Auto).map_err(fail)?;
    let grid = linspace(0.0, 40.0, 201);
    let rho0 = DensityMatrix::from_ket(&Ket::from_amplitudes(&[c(0.6, 0.0), c(0.0, 0.8)]).map_err(fail)?)
        .map_err(fail)?;
    let br = solve_br(&tensor, &rho0, &grid, &SolverOptions::default()).map_err(fail)?;
    let lind_model = LindbladModel::new(
        h.clone(),
        vec![
            Channel::new(ops::sigma_minus(), s0).map_err(fail)?,
            Channel::new(ops::sigma_plus(), s0).map_err(fail)?,
        ],
    )
    .map_err(fail)?;
    let lind = solve_lindblad(&lind_model, &rho0, &grid, &SolverOptions::default()).map_err(fail)?;
    let diff = br
        .states
        .iter()
        .zip(&lind.states)
        .map(|(a, b)| (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let trace_err = tensor.trace_error();
    let mut herm = 0.0f64;
    for seed in 0..20 {
        let x = random_hermitian(2, 100 + seed);
        let y = unvec(&(tensor.generator() * vec_of(&x)), 2);
        let dev = (&y - y.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        herm = herm.max(dev / x.norm().max(1.0));
    }
    herm = herm.max(br.diagnostics.max_hermiticity_error);
    check(
        diff <= 1e-6 && trace_err <= 1e-12 && herm <= 1e-9,
        format!("max |rho_BR - rho_L| = {diff:.3e}; trace annihilation {trace_err:.2e}; hermiticity {herm:.2e}"),
    )
}

fn c5_schrieffer_wolff() -> Outcome {
    let (wr, wq, g) = (5.0, 6.0, 0.05);
    let delta = wq - wr;
    let levels = [0.0, wq];
    let coupling = jc_coupling_matrix(g);
    let model = schrieffer_wolff(&levels, &coupling, wr, DEFAULT_DISPERSIVE_FACTOR).map_err(fail)?;
    let nmax = 6;
    let h = multilevel_coupling(&levels, &coupling, wr, nmax).map_err(fail)?;
    let (energies, vectors) = sqdyn::eigh(h.matrix());
    // Dressed level adiabatically connected to |j, n⟩ (cavity first, atom second).
    let dressed = |j: usize, n: usize| -> f64 {
        let idx = n * 2 + j;
        let k = (0..energies.len())
            .max_by(|&a, &b| vectors[(idx, a)].norm().total_cmp(&vectors[(idx, b)].norm()))
            .unwrap();
        energies[k]
    };
    let bound = 2.0 * g.powi(4) / delta.powi(3);
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (j, n) in [(0usize, 0usize), (1, 0), (0, 1)] {
        let exact = dressed(j, n) - (levels[j] + n as f64 * wr);
        let err = (exact - model.level_shift(j, n)).abs();
        parts.push(format!("|{j},{n}> {err:.2e}"));
        worst = worst.max(err);
    }
    let wq_exact = dressed(1, 0) - dressed(0, 0);
    let wq_err = (wq_exact - model.omega_q_prime).abs();
    worst = worst.max(wq_err);
    let chi = model.chi_matrix[(0, 1)];
    let chi_ok = chi == g * g / delta && model.chi_qubit == g * g / delta;
    check(
        worst <= bound && chi_ok,
        format!(
            "shift residuals {} , w_q' {wq_err:.2e} (bound 2g^4/D^3 = {bound:.2e}); chi = {chi} vs g^2/D = {}",
            parts.join(", "),
            g * g / delta
        ),
    )
}

fn driven_qubit(wq: f64, amp: f64, wd: f64) -> Result<Hamiltonian, String> {
    Hamiltonian::driven(ops::sigma_z().scaled(c(wq / 2.0, 0.0)), vec![(ops::sigma_x(), Drive::cosine(amp, wd))])
        .map_err(fail)
}

fn c6_floquet() -> Outcome {
    // Undriven quasienergies are folded eigenvalues.
    let (wq, wd) = (5.0, 3.0);
    let basis = floquet_modes(&driven_qubit(wq, 0.0, wd)?, 2.0 * PI / wd, 256).map_err(fail)?;
    let mut expected = vec![fold_quasienergy(-wq / 2.0, wd), fold_quasienergy(wq / 2.0, wd)];
    expected.sort_by(f64::total_cmp);
    let qe_err = basis
        .quasienergies()
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    // Driven reconstruction against direct integration over five periods.
    let wd2 = 1.3;
    let period = 2.0 * PI / wd2;
    let h = driven_qubit(1.0, 0.8, wd2)?;
    let driven = floquet_modes(&h, period, 256).map_err(fail)?;
    let psi0 = Ket::from_amplitudes(&[c(0.6, 0.0), c(0.0, 0.8)]).map_err(fail)?;
    let times = linspace(0.0, 5.0 * period, 201);
    let a = driven.evolve_ket(&psi0, &times).map_err(fail)?;
    let b = integrate_ket(&h, &psi0, &times, OdeOptions::tight()).map_err(fail)?;
    let recon = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x.amplitudes() - y.amplitudes()).camax())
        .fold(0.0, f64::max);

    // Undriven Floquet rates against the golden rule with a sigma_x coupling.
    let (wq3, wd3) = (1.3, 2.0);
    let undriven = floquet_modes(&driven_qubit(wq3, 0.0, wd3)?, 2.0 * PI / wd3, 256).map_err(fail)?;
    let spectrum = NoiseSpectrum::dielectric(0.2, 0.7);
    let cp = floquet_couplings(&undriven, &ops::sigma_x(), 4).map_err(fail)?;
    let rates = floquet_rates(&cp, &spectrum).map_err(fail)?;
    let gr = golden_rule_rates_two_sided(&coefficients(0.0, 2.0, wq3), &spectrum, wq3).map_err(fail)?;
    let total = rates.gamma_plus + rates.gamma_minus;
    let rate_rel = (total - gr.gamma1).abs() / gr.gamma1;
    check(
        qe_err <= 1e-10 && recon <= 1e-7 && rate_rel <= 0.01,
        format!(
            "quasienergy error {qe_err:.2e}; reconstruction error {recon:.2e}; gamma_+ + gamma_- = {total:.6e} vs golden-rule {:.6e} (rel {rate_rel:.2e})",
            gr.gamma1
        ),
    )
}

fn c7_pmme_markov_limit() -> Outcome {
    let h = ops::sigma_x().scaled(c(0.5, 0.0));
    let l0 = liouvillian(&h, &[Channel::new(ops::sigma_minus(), 1.0).map_err(fail)?]).map_err(fail)?;
    let l1 = nonmarkov_dephasing(0.5).map_err(fail)?;
    let combined = l0.try_add(&l1).map_err(fail)?;
    let rho0 = DensityMatrix::from_ket(&Ket::plus()).map_err(fail)?;
    let t_end = 3.0;
    let gammas = [25.0f64, 50.0, 100.0, 200.0];
    let mut dists = Vec::new();
    for &g in &gammas {
        let dt = 0.02 / g;
        let steps = (t_end / dt).round() as usize;
        let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
        let model = PMMEModel::new(l0.clone(), l1.clone(), Kernel::NormalizedExponential { gamma: g }).map_err(fail)?;
        let res = solve_pmme(&model, &rho0, &grid, &SolverOptions::default()).map_err(fail)?;
        let stride = (steps / 300).max(1);
        let mut worst = 0.0f64;
        for i in (0..=steps).step_by(stride) {
            let exact = unvec(&(combined.exp(grid[i]) * vec_of(rho0.matrix())), 2);
            worst = worst.max(trace_distance_matrices(res.states[i].matrix(), &exact));
        }
        dists.push(worst);
    }
    let xs: Vec<f64> = gammas.iter().map(|g| g.ln()).collect();
    let ys: Vec<f64> = dists.iter().map(|d| d.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 4.0;
    let my = ys.iter().sum::<f64>() / 4.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let monotone = dists.windows(2).all(|w| w[1] < w[0]);
    check(
        (slope + 1.0).abs() <= 0.2 && monotone,
        format!(
            "max trace distances {:?} at gamma {:?}; log-log slope {slope:.3}",
            dists.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>(),
            gammas
        ),
    )
}

fn c8_sme_averaging() -> Outcome {
    let k = 1.0;
    let h = 0.01;
    let steps = 100;
    let n_paths = 2000;
    let grid = uniform_grid(h, steps);
    let rho0 = DensityMatrix::from_ket(&Ket::plus()).map_err(fail)?;
    let runs = par_paths(n_paths, |i| {
        let path = WienerPath::generate(steps, 1, h, false, 777, i as u64)?;
        solve_sme_z(k, &rho0, &grid, &path, SmeScheme::Kraus).map(|r| r.coherence())
    })
    .map_err(fail)?;
    let nf = n_paths as f64;
    let mut worst_z = 0.0f64;
    let mut all_ok = true;
    for (i, &t) in grid.iter().enumerate() {
        let vals: Vec<f64> = runs.iter().map(|r| r[i]).collect();
        let mean = vals.iter().sum::<f64>() / nf;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        let se = (var / nf).sqrt();
        let target = 0.5 * (-2.0 * k * t).exp();
        let dev = (mean - target).abs();
        if dev > 3.0 * se + 1e-12 {
            all_ok = false;
        }
        if se > 0.0 {
            worst_z = worst_z.max(dev / se);
        }
    }

    // Purity agreement between SSE and SME driven by the same increments.
    let mut purity_gap = Vec::new();
    for factor in [2usize, 1] {
        let fine = 2 * steps;
        let hf = h / 2.0;
        let coarse_h = hf * factor as f64;
        let coarse_grid = uniform_grid(coarse_h, fine / factor);
        let gaps = par_paths(200, |i| {
            let path = WienerPath::generate(fine, 1, hf, false, 4242, i as u64)?.coarsen(factor)?;
            let sse = solve_sse_z(k, &Ket::plus(), &coarse_grid, &path)?;
            let sme = solve_sme_z(k, &rho0, &coarse_grid, &path, SmeScheme::Kraus)?;
            let gap = sse
                .kets
                .iter()
                .zip(sme.purity())
                .map(|(psi, p)| (psi.norm().powi(4) - p).abs())
                .fold(0.0, f64::max);
            Ok(gap)
        })
        .map_err(fail)?;
        purity_gap.push((coarse_h, gaps.into_iter().fold(0.0, f64::max)));
    }
    let purity_ok = purity_gap.iter().all(|(step, gap)| *gap <= *step);
    check(
        all_ok && purity_ok,
        format!(
            "mean |rho01| within 3 SE at all {} points (worst {worst_z:.2} SE); SSE/SME purity gap {}",
            grid.len(),
            purity_gap
                .iter()
                .map(|(s, g)| format!("{g:.2e} at h = {s}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn c9_measurement_statistics() -> Outcome {
    let k = 1.0;
    let h = 0.01;
    let steps = 1000;
    let n = 4000;
    let grid = uniform_grid(h, steps);
    let finals = par_paths(n, |i| {
        let path = WienerPath::generate(steps, 1, h, false, 99, i as u64)?;
        let traj = solve_sse_z(k, &Ket::plus(), &grid, &path)?;
        Ok(*traj.expect_sz().last().unwrap())
    })
    .map_err(fail)?;
    let up = finals.iter().filter(|z| **z > 0.99).count() as f64 / n as f64;
    let sigma = (0.25 / n as f64).sqrt();
    let undecided = finals.iter().filter(|z| z.abs() <= 0.99).count();
    check(
        (up - 0.5).abs() <= 3.0 * sigma,
        format!("fraction with <sz> > 0.99: {up:.4} (0.5 +- {:.4}); {undecided} paths undecided", 3.0 * sigma),
    )
}

fn c10_circuits() -> Outcome {
    let transmon = CircuitParams::transmon(1.0, 50.0, 0.0);
    let a = cpb_spectrum(&transmon, 25, 2).map_err(fail)?;
    let b = cpb_spectrum(&transmon, 50, 2).map_err(fail)?;
    let transmon_change = (a.transition(0, 1) - b.transition(0, 1)).abs();

    let flux = CircuitParams::fluxonium(1.0, 4.0, 1.0, PI);
    let grid = PhaseGrid::new(-5.0 * PI, 5.0 * PI, 16001);
    let f1 = fluxonium_spectrum(&flux, &grid, 2).map_err(fail)?.transition(0, 1);
    let f2 = fluxonium_spectrum(&flux, &grid.refined(), 2).map_err(fail)?.transition(0, 1);
    let flux_change = (f1 - f2).abs() / f2.abs();

    let mut period_err = 0.0f64;
    for n_ext in [0.0, 0.17, 0.3, 0.5] {
        let base = cpb_spectrum(&CircuitParams::transmon(1.0, 1.0, n_ext), 20, 3).map_err(fail)?;
        for shift in [1.0, -1.0] {
            let other = cpb_spectrum(&CircuitParams::transmon(1.0, 1.0, n_ext + shift), 20, 3).map_err(fail)?;
            for (x, y) in base.energies.iter().zip(&other.energies) {
                period_err = period_err.max((x - y).abs());
            }
        }
    }
    check(
        transmon_change <= 1e-10 && flux_change < 1e-6 && period_err <= 1e-8,
        format!(
            "transmon E01 change {transmon_change:.2e}; fluxonium relative change {flux_change:.2e}; CPB period error {period_err:.2e}"
        ),
    )
}

fn c11_input_output() -> Outcome {
    let port = CavityPort::new(7.0, 0.4).map_err(fail)?;
    let sweep = linspace(7.0 - 4.0, 7.0 + 4.0, 201);
    let unit = sweep.iter().map(|&w| (reflection(&port, w).norm() - 1.0).abs()).fold(0.0, f64::max);
    let resonant = (reflection(&port, 7.0) - c(-1.0, 0.0)).norm();
    let cases = [((2.0, 1.0, 4.0, 3.0), 4.5), ((0.5, 2.0, 8.0, 4.0), 4.0), ((3.0, 0.5, 0.25, 2.0), 12.0)];
    let mut exact = true;
    for ((z, ck, cr, wr), want) in cases {
        exact &= photon_loss_rate(z, ck, cr, wr).map_err(fail)? == want;
    }
    check(
        unit <= 1e-12 && resonant <= 1e-12 && exact,
        format!("max ||r| - 1| = {unit:.2e}; |r(w_r) + 1| = {resonant:.2e}; loss-rate formula exact: {exact}"),
    )
}

fn run_cli(config: &Path, out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_sqdyn"))
        .arg("simulate")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(fail)?;
    if !status.status.success() {
        return Err(format!(
            "sqdyn exited with {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr)
        ));
    }
    std::fs::read(out.join("timeseries.csv")).map_err(fail)
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(fail)?;
    let specs = [
        ("lindblad", r#"{"kind": "lindblad"}"#, "null"),
        ("mcwf", r#"{"kind": "mcwf", "trajectories": 300}"#, "12345"),
        ("sme", r#"{"kind": "sme", "k": 0.5, "paths": 50}"#, "2024"),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, solver, seed) in specs {
        let config = format!(
            r#"{{
  "schema_version": 1,
  "system": {{"kind": "qubit", "omega_q": 1.0}},
  "noise": {{"channels": [{{"operator": "sm", "rate": 0.5}}, {{"operator": "sz", "rate": 0.1}}]}},
  "solver": {solver},
  "grid": {{"t_start": 0.0, "t_end": 4.0, "points": 41}},
  "initial_state": "plus",
  "observables": [{{"name": "sx", "operator": "sx"}}, {{"name": "pe", "operator": "P1"}}],
  "seed": {seed}
}}"#
        );
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, config).map_err(fail)?;
        let a = run_cli(&path, &dir.path().join(format!("{name}-a")))?;
        let b = run_cli(&path, &dir.path().join(format!("{name}-b")))?;
        let same = a == b && !a.is_empty();
        ok &= same;
        parts.push(format!("{name}: {} bytes {}", a.len(), if same { "identical" } else { "DIFFER" }));
    }
    check(ok, parts.join("; "))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 Lindblad amplitude damping", c1_amplitude_damping),
        ("2 coherence decay closure", c2_dephasing_closure),
        ("3 trajectory/Lindblad equivalence", c3_trajectory_equivalence),
        ("4 Bloch-Redfield flat-spectrum limit", c4_redfield_flat),
        ("5 Schrieffer-Wolff accuracy", c5_schrieffer_wolff),
        ("6 Floquet sanity", c6_floquet),
        ("7 PMME Markovian limit", c7_pmme_markov_limit),
        ("8 SME averaging", c8_sme_averaging),
        ("9 measurement statistics", c9_measurement_statistics),
        ("10 circuit diagonalization", c10_circuits),
        ("11 input-output identities", c11_input_output),
        ("12 end-to-end determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.2} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
