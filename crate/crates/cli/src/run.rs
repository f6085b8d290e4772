//! Subcommand drivers. Each returns the artifacts to write; nothing here
//! touches the file system.

use serde_json::{json, Value};
use sqdyn::analysis::{fit_t1, fit_t2_ramsey};
use sqdyn::circuits::{qubit_parameters, schrieffer_wolff, CircuitModel};
use sqdyn::floquet::{
    filter_function, floquet_couplings, floquet_modes, floquet_rates, solve_floquet_markov, FloquetBasis, FloquetChannel,
    FloquetRates,
};
use sqdyn::inout::{dispersive_readout_curve, photon_loss_rate, CavityPort};
use sqdyn::lindblad::{solve_lindblad, EvolutionResult, Hamiltonian, LindbladModel, PositivityPolicy, SolverOptions};
use sqdyn::mcwf::{ensemble_average, JumpModel, TrajectoryOptions};
use sqdyn::noise::{golden_rule_rates, golden_rule_rates_two_sided, sensitivity};
use sqdyn::nonmarkov::{nonmarkov_dephasing, solve_pmme, PMMEModel};
use sqdyn::ode::{linspace, OdeOptions};
use sqdyn::redfield::{br_tensor, solve_br, CouplingSpec, SecularCutoff};
use sqdyn::stochastic::{par_paths, MeasurementRecord, solve_sme_z, solve_sse_z, sse_markov_ensemble, uniform_grid, SmeScheme, WienerPath};
use sqdyn::{c, liouvillian, trace_of_product, DensityMatrix, HilbertSpace, Operator, C64};

use nalgebra::DMatrix;

use crate::build;
use crate::config::{
    CircuitSpec, CouplingEntry, CutoffSpec, ExperimentSpec, FitModel, FloquetSpec, PortSpec, RatesSpec, ReadoutSpec,
    SmeSchemeSpec, SolverSpec,
};
use crate::error::CliError;

/// Column table plus a JSON summary.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv_name: Option<&'static str>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Further tables written next to the main one.
    pub tables: Vec<Table>,
    pub summary: Value,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn solver_err(context: &str) -> impl Fn(sqdyn::Error) -> CliError + '_ {
    move |e| CliError::solver(context, e)
}

fn model_err(context: &str) -> impl Fn(sqdyn::Error) -> CliError + '_ {
    move |e| CliError::model(context, e)
}

fn static_hamiltonian(h: &Hamiltonian, solver: &str) -> Result<Operator, CliError> {
    if !h.is_static() {
        return Err(CliError::Config(format!("at `system`: the {solver} solver needs a time-independent Hamiltonian")));
    }
    h.at(0.0).map_err(model_err("system"))
}

fn couplings(entries: &[CouplingEntry], space: &HilbertSpace) -> Result<Vec<(Operator, sqdyn::noise::NoiseSpectrum)>, CliError> {
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let op = build::operator(&e.operator, space, &format!("noise.couplings[{i}].operator"))?;
            e.spectrum.validate().map_err(model_err(&format!("noise.couplings[{i}].spectrum")))?;
            Ok((op, e.spectrum.clone()))
        })
        .collect()
}

fn diagnostics_json(r: &EvolutionResult) -> Value {
    let d = &r.diagnostics;
    let mut v = json!({
        "max_trace_drift": d.max_trace_drift,
        "min_eigenvalue": d.min_eigenvalue,
        "max_hermiticity_error": d.max_hermiticity_error,
        "accepted_steps": d.accepted_steps,
        "rejected_steps": d.rejected_steps,
        "rhs_evals": d.rhs_evals,
    });
    for (k, x) in &d.extra {
        v[k] = json!(x);
    }
    v
}

fn series_from_result(r: &EvolutionResult, names: &[String]) -> Vec<Vec<f64>> {
    names.iter().map(|n| r.real_series(n).unwrap_or_default()).collect()
}

fn series_from_states(states: &[DMatrix<C64>], observables: &[(String, Operator)]) -> Vec<Vec<f64>> {
    observables
        .iter()
        .map(|(_, op)| states.iter().map(|rho| trace_of_product(op.matrix(), rho).re).collect())
        .collect()
}

/// Index-ordered mean of per-path state sequences.
fn average_states(runs: Vec<Vec<DMatrix<C64>>>) -> Vec<DMatrix<C64>> {
    let n = runs.len() as f64;
    let mut iter = runs.into_iter();
    let mut acc = iter.next().unwrap_or_default();
    for run in iter {
        for (a, b) in acc.iter_mut().zip(run) {
            *a += b;
        }
    }
    for a in &mut acc {
        *a /= c(n, 0.0);
    }
    acc
}

/// One row per measurement interval: path index, interval start, scaled signal.
fn record_table(records: &[MeasurementRecord], t0: f64) -> Table {
    let rows = records
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.times.iter().zip(&r.values).map(move |(t, v)| vec![i as f64, t0 + t, *v]))
        .collect();
    Table { name: "records.csv", header: strings(&["path", "t", "v_tilde"]), rows }
}

fn fine_grid(spec: &ExperimentSpec, substeps: usize) -> (f64, usize) {
    let steps = (spec.grid.points - 1) * substeps;
    ((spec.grid.t_end - spec.grid.t_start) / steps as f64, steps)
}

fn sum_rates(basis: &FloquetBasis, entries: &[(Operator, sqdyn::noise::NoiseSpectrum)], kmax: usize) -> Result<FloquetRates, CliError> {
    let mut total = FloquetRates::default();
    for (k, (op, spectrum)) in entries.iter().enumerate() {
        let cp = floquet_couplings(basis, op, kmax).map_err(model_err(&format!("couplings[{k}]")))?;
        total = total + floquet_rates(&cp, spectrum).map_err(solver_err("floquet rates"))?;
    }
    Ok(total)
}

pub fn simulate(spec: &ExperimentSpec) -> Result<Artifacts, CliError> {
    spec.validate()?;
    let ham = build::hamiltonian(&spec.system)?;
    let space = ham.space().clone();
    let mut observables = Vec::with_capacity(spec.observables.len());
    for (i, o) in spec.observables.iter().enumerate() {
        let op = build::operator(&o.operator, &space, &format!("observables[{i}].operator"))?;
        observables.push((o.name.clone(), op));
    }
    let names: Vec<String> = observables.iter().map(|(n, _)| n.clone()).collect();
    let times = spec.grid.times();
    let channels = build::channels(&spec.noise.channels, &space)?;
    let seed = spec.seed.unwrap_or(0);
    let mut extra = json!({});
    let mut tables = Vec::new();
    let t0 = spec.grid.t_start;

    let base_opts = SolverOptions { store_states: false, observables: observables.clone(), ..SolverOptions::default() };
    let (columns, diagnostics): (Vec<Vec<f64>>, Value) = match &spec.solver {
        SolverSpec::Lindblad { method, rtol, atol } => {
            let mut ode = OdeOptions::default();
            if let Some(r) = rtol {
                ode.rtol = *r;
            }
            if let Some(a) = atol {
                ode.atol = *a;
            }
            let model = LindbladModel::new(ham, channels).map_err(model_err("noise.channels"))?;
            let rho0 = build::initial_density(&spec.initial_state, &space)?;
            let opts = SolverOptions { method: *method, ode, ..base_opts };
            let r = solve_lindblad(&model, &rho0, &times, &opts).map_err(solver_err("lindblad"))?;
            (series_from_result(&r, &names), diagnostics_json(&r))
        }
        SolverSpec::Redfield { secular_cutoff } => {
            let h = static_hamiltonian(&ham, "redfield")?;
            let cs = CouplingSpec::new(couplings(&spec.noise.couplings, &space)?).map_err(model_err("noise.couplings"))?;
            let cutoff = match secular_cutoff {
                CutoffSpec::Auto => SecularCutoff::Auto,
                CutoffSpec::None => SecularCutoff::None,
                CutoffSpec::Value(v) => SecularCutoff::Value(*v),
            };
            let tensor = br_tensor(&h, &cs, cutoff).map_err(solver_err("redfield tensor"))?;
            let rho0 = build::initial_density(&spec.initial_state, &space)?;
            let r = solve_br(&tensor, &rho0, &times, &base_opts).map_err(solver_err("redfield"))?;
            extra["secular_cutoff"] = json!(tensor.secular_cutoff());
            extra["trace_error"] = json!(tensor.trace_error());
            (series_from_result(&r, &names), diagnostics_json(&r))
        }
        SolverSpec::Mcwf { trajectories, export_jumps } => {
            let lind = LindbladModel::new(ham, channels).map_err(model_err("noise.channels"))?;
            let model = JumpModel::from_lindblad(&lind).map_err(model_err("noise.channels"))?;
            let psi0 = build::initial_ket(&spec.initial_state, &space)?;
            let opts = TrajectoryOptions { observables: observables.clone(), keep_jumps: *export_jumps, ..Default::default() };
            let ens = ensemble_average(&model, &psi0, &times, *trajectories, seed, &opts).map_err(solver_err("mcwf"))?;
            if *export_jumps {
                let rows = ens
                    .jumps
                    .iter()
                    .flat_map(|tj| tj.jumps.iter().map(move |j| vec![tj.index as f64, j.time, j.channel as f64]))
                    .collect();
                tables.push(Table { name: "jumps.csv", header: strings(&["trajectory_id", "jump_time", "channel"]), rows });
            }
            let cols = names.iter().map(|n| ens.observable(n).map(|o| o.mean.clone()).unwrap_or_default()).collect();
            extra["mean_jumps"] = json!(ens.jump_stats.mean);
            extra["mean_jumps_std_error"] = json!(ens.jump_stats.std_error);
            extra["jumps_per_channel"] = json!(ens.jump_stats.per_channel);
            (cols, json!({ "trajectories": ens.n_traj, "max_norm_growth": ens.max_norm_growth }))
        }
        SolverSpec::Floquet { steps, kmax } => {
            let period = ham
                .period()
                .ok_or_else(|| CliError::Config("at `system.drive`: the floquet solver needs a periodic drive".into()))?;
            let basis = floquet_modes(&ham, period, *steps).map_err(solver_err("floquet modes"))?;
            let entries = couplings(&spec.noise.couplings, &space)?;
            let rates = sum_rates(&basis, &entries, *kmax)?;
            let rho0 = build::initial_density(&spec.initial_state, &space)?;
            let r = solve_floquet_markov(&basis, &rates, &rho0, &times, &base_opts).map_err(solver_err("floquet"))?;
            extra["quasienergies"] = json!(basis.quasienergies());
            extra["rates"] = serde_json::to_value(rates).unwrap_or(Value::Null);
            (series_from_result(&r, &names), diagnostics_json(&r))
        }
        SolverSpec::Pmme {} => {
            let h = static_hamiltonian(&ham, "pmme")?;
            let memory = spec.noise.memory.as_ref().expect("checked in validate");
            let l0 = liouvillian(&h, &channels).map_err(model_err("noise.channels"))?;
            if space.total() != 2 {
                return Err(CliError::Config("at `noise.memory`: memory dephasing needs a two-level system".into()));
            }
            let l1 = nonmarkov_dephasing(memory.dephasing_rate).map_err(model_err("noise.memory.dephasing_rate"))?;
            let l1 = sqdyn::Superoperator::new(l1.matrix().clone(), space.clone()).map_err(model_err("noise.memory"))?;
            let model = PMMEModel::new(l0, l1, memory.kernel.clone()).map_err(model_err("noise.memory"))?;
            let rho0 = build::initial_density(&spec.initial_state, &space)?;
            let opts = SolverOptions { positivity: PositivityPolicy::Report, ..base_opts };
            let r = solve_pmme(&model, &rho0, &times, &opts).map_err(solver_err("pmme"))?;
            (series_from_result(&r, &names), diagnostics_json(&r))
        }
        SolverSpec::Sse { k, paths, scheme, substeps, export_records } => {
            if *export_records && k.is_none() {
                return Err(CliError::Config("at `solver.export_records`: records exist only for σz measurement (set `k`)".into()));
            }
            let (h, steps) = fine_grid(spec, *substeps);
            let grid = uniform_grid(h, steps);
            let psi0 = build::initial_ket(&spec.initial_state, &space)?;
            let states: Vec<DMatrix<C64>> = match k {
                Some(k) => {
                    if space.total() != 2 {
                        return Err(CliError::Config("at `solver.k`: σz measurement needs a two-level system".into()));
                    }
                    if !spec.noise.channels.is_empty() || !ham.is_static() || ham.at(0.0).map(|o| o.frobenius_norm() > 0.0).unwrap_or(true) {
                        log::warn!("measurement trajectories ignore the Hamiltonian and noise channels");
                    }
                    let runs = par_paths(*paths, |i| {
                        let path = WienerPath::generate(steps, 1, h, false, seed, i)?;
                        let traj = solve_sse_z(*k, &psi0, &grid, &path)?;
                        let states = traj
                            .kets
                            .iter()
                            .step_by(*substeps)
                            .map(|psi| {
                                let a = psi.amplitudes();
                                a * a.adjoint()
                            })
                            .collect::<Vec<_>>();
                        Ok((states, traj.record))
                    })
                    .map_err(solver_err("sse"))?;
                    let (states, records): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
                    if *export_records {
                        tables.push(record_table(&records, t0));
                    }
                    average_states(states)
                }
                None => {
                    let h_op = static_hamiltonian(&ham, "sse")?;
                    let collapse: Vec<Operator> = channels.iter().map(|ch| ch.collapse()).collect();
                    let ens = sse_markov_ensemble(&h_op, &collapse, &psi0, &grid, *scheme, *paths, seed)
                        .map_err(solver_err("sse"))?;
                    extra["mean_norm_sq_final"] = json!(ens.mean_norm_sq.last());
                    ens.states.iter().step_by(*substeps).map(|s| s.matrix().clone()).collect()
                }
            };
            extra["paths"] = json!(paths);
            extra["step"] = json!(h);
            (series_from_states(&states, &observables), json!({}))
        }
        SolverSpec::Sme { k, paths, scheme, substeps, export_records } => {
            if space.total() != 2 {
                return Err(CliError::Config("at `solver.k`: σz measurement needs a two-level system".into()));
            }
            let (h, steps) = fine_grid(spec, *substeps);
            let grid = uniform_grid(h, steps);
            let rho0 = build::initial_density(&spec.initial_state, &space)?;
            let rho0 = DensityMatrix::new(rho0.into_matrix(), HilbertSpace::qubit()).map_err(model_err("initial_state"))?;
            let scheme = match scheme {
                SmeSchemeSpec::Kraus => SmeScheme::Kraus,
                SmeSchemeSpec::EulerMaruyama => SmeScheme::EulerMaruyama,
            };
            let runs = par_paths(*paths, |i| {
                let path = WienerPath::generate(steps, 1, h, false, seed, i)?;
                let r = solve_sme_z(*k, &rho0, &grid, &path, scheme)?;
                let states = r.states.iter().step_by(*substeps).map(|s| s.matrix().clone()).collect::<Vec<_>>();
                Ok((states, r.min_eigenvalue, r.record))
            })
            .map_err(solver_err("sme"))?;
            let min_eig = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            let mut states = Vec::with_capacity(runs.len());
            let mut records = Vec::with_capacity(runs.len());
            for (st, _, rec) in runs {
                states.push(st);
                records.push(rec);
            }
            if *export_records {
                tables.push(record_table(&records, t0));
            }
            let states = average_states(states);
            extra["paths"] = json!(paths);
            extra["step"] = json!(h);
            (series_from_states(&states, &observables), json!({ "min_eigenvalue": min_eig }))
        }
    };

    let mut header = vec!["t".to_string()];
    header.extend(names.iter().cloned());
    let rows: Vec<Vec<f64>> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| std::iter::once(t).chain(columns.iter().map(|col| col[i])).collect())
        .collect();

    let mut summary = json!({
        "solver": spec.solver.name(),
        "seed": spec.seed,
        "points": times.len(),
        "diagnostics": diagnostics,
        "details": extra,
    });
    if let Some(fit) = &spec.fit {
        let k = names.iter().position(|n| *n == fit.observable).expect("checked in validate");
        let result = match fit.model {
            FitModel::T1 => fit_t1(&times, &columns[k]),
            FitModel::Ramsey => fit_t2_ramsey(&times, &columns[k], fit.detuning_hint),
        };
        match result {
            Ok(r) => summary["fit"] = serde_json::to_value(r).unwrap_or(Value::Null),
            Err(e) => summary["fit_error"] = json!(e.to_string()),
        }
    }
    Ok(Artifacts { csv_name: Some("timeseries.csv"), header, rows, tables, summary })
}

pub fn circuit(spec: &CircuitSpec) -> Result<Artifacts, CliError> {
    spec.validate()?;
    let s = spec.model.spectrum(&spec.params, spec.levels).map_err(solver_err("spectrum"))?;
    let q = qubit_parameters(&s).map_err(solver_err("qubit parameters"))?;
    let mut summary = json!({
        "energies": s.energies,
        "omega_q": q.omega_q,
        "anharmonicity": q.anharmonicity,
    });
    if let Some(d) = &spec.dispersive {
        let l = spec.levels;
        let g = match (&d.charge_coupling, &d.couplings) {
            (Some(g0), _) => {
                let CircuitModel::Charge { ncut } = spec.model else { unreachable!("checked in validate") };
                let charge: Vec<f64> = (0..2 * ncut + 1).map(|k| k as f64 - ncut as f64).collect();
                DMatrix::from_fn(l, l, |i, j| {
                    let vi = s.states.column(i);
                    let vj = s.states.column(j);
                    let elem: C64 = (0..charge.len()).map(|k| vi[k].conj() * vj[k] * charge[k]).sum();
                    elem * *g0
                })
            }
            (None, Some(m)) => build::matrix(m, l, "dispersive.couplings")?,
            (None, None) => unreachable!("checked in validate"),
        };
        let shifted: Vec<f64> = s.energies.iter().map(|e| e - s.energies[0]).collect();
        let dm = schrieffer_wolff(&shifted, &g, d.omega_r, d.factor).map_err(solver_err("dispersive model"))?;
        let chi_rows: Vec<Vec<f64>> = (0..l).map(|i| (0..l).map(|j| dm.chi_matrix[(i, j)]).collect()).collect();
        summary["dispersive"] = json!({
            "chi_matrix": chi_rows,
            "lamb_shifts": dm.lamb_shifts,
            "level_pulls": dm.level_pulls,
            "chi_qubit": dm.chi_qubit,
            "omega_r_prime": dm.omega_r_prime,
            "omega_q_prime": dm.omega_q_prime,
        });
    }
    let rows = s.energies.iter().enumerate().map(|(k, e)| vec![k as f64, *e]).collect();
    Ok(Artifacts {
        csv_name: Some("levels.csv"),
        header: vec!["level".into(), "energy".into()],
        rows,
        tables: Vec::new(),
        summary,
    })
}

pub fn rates(spec: &RatesSpec) -> Result<Artifacts, CliError> {
    spec.validate()?;
    let coeff = sensitivity(&spec.params, &spec.model, spec.parameter, spec.delta).map_err(solver_err("sensitivity"))?;
    let rates = if spec.two_sided {
        golden_rule_rates_two_sided(&coeff, &spec.spectrum, coeff.omega_q)
    } else {
        golden_rule_rates(&coeff, &spec.spectrum, coeff.omega_q)
    }
    .map_err(solver_err("golden rule"))?;
    let summary = json!({
        "sensitivity": serde_json::to_value(&coeff).unwrap_or(Value::Null),
        "rates": serde_json::to_value(rates).unwrap_or(Value::Null),
    });
    Ok(Artifacts { csv_name: None, header: Vec::new(), rows: Vec::new(), tables: Vec::new(), summary })
}

pub fn floquet(spec: &FloquetSpec) -> Result<Artifacts, CliError> {
    spec.validate()?;
    let ham = build::hamiltonian(&spec.system)?;
    let period = ham
        .period()
        .ok_or_else(|| CliError::Config("at `system.drive`: drive frequency must be nonzero".into()))?;
    let basis = floquet_modes(&ham, period, spec.steps).map_err(solver_err("floquet modes"))?;
    let mut summary = json!({
        "period": basis.period(),
        "omega": basis.omega(),
        "quasienergies": basis.quasienergies(),
        "unitarity_error": basis.unitarity_error(),
        "orthonormality_error": basis.orthonormality_error(),
        "periodicity_error": basis.periodicity_error(),
    });
    let mut tables = Vec::new();
    if !spec.couplings.is_empty() {
        let entries = couplings(&spec.couplings, ham.space())?;
        let mut total = FloquetRates::default();
        let mut per_coupling = Vec::new();
        let mut g_rows = Vec::new();
        let mut f_rows = Vec::new();
        let filter_grid = spec.filter.as_ref().map(|f| linspace(f.start, f.end, f.points));
        for (i, (op, spectrum)) in entries.iter().enumerate() {
            let cp = floquet_couplings(&basis, op, spec.kmax).map_err(model_err(&format!("couplings[{i}]")))?;
            let r = floquet_rates(&cp, spectrum).map_err(solver_err("floquet rates"))?;
            total = total + r;
            per_coupling.push(json!({
                "rates": serde_json::to_value(r).unwrap_or(Value::Null),
                "truncated_fraction": cp.truncated,
                "pairing_error": cp.pairing_error,
            }));
            for k in cp.ks() {
                let mut row = vec![i as f64, k as f64];
                for ch in FloquetChannel::ALL {
                    row.push(cp.omega_k(ch, k));
                    row.push(cp.g(ch, k).norm_sqr());
                }
                g_rows.push(row);
            }
            if let (Some(f), Some(grid)) = (&spec.filter, &filter_grid) {
                for &w in grid {
                    let mut row = vec![i as f64, w];
                    for ch in FloquetChannel::ALL {
                        row.push(filter_function(&cp, ch, w, f.time).map_err(model_err("filter.time"))?);
                    }
                    f_rows.push(row);
                }
            }
        }
        summary["rates"] = serde_json::to_value(total).unwrap_or(Value::Null);
        summary["couplings"] = json!(per_coupling);
        tables.push(Table {
            name: "couplings.csv",
            header: strings(&["coupling", "k", "omega_plus", "g2_plus", "omega_minus", "g2_minus", "omega_phi", "g2_phi"]),
            rows: g_rows,
        });
        if spec.filter.is_some() {
            tables.push(Table {
                name: "filter.csv",
                header: strings(&["coupling", "omega", "f_plus", "f_minus", "f_phi"]),
                rows: f_rows,
            });
        }
    }
    let rows = basis.quasienergies().iter().enumerate().map(|(k, e)| vec![k as f64, *e]).collect();
    Ok(Artifacts {
        csv_name: Some("quasienergies.csv"),
        header: strings(&["mode", "quasienergy"]),
        rows,
        tables,
        summary,
    })
}

/// `plus` columns are the resonator pulled to ω_r + χ (qubit excited),
/// `minus` to ω_r − χ (qubit in ground).
pub fn readout(spec: &ReadoutSpec) -> Result<Artifacts, CliError> {
    spec.validate()?;
    let port = match spec.port {
        PortSpec::Direct { omega_r, kappa } => CavityPort::new(omega_r, kappa),
        PortSpec::Circuit { z_tml, c_k, c_r, omega_r } => {
            photon_loss_rate(z_tml, c_k, c_r, omega_r).and_then(|kappa| CavityPort::new(omega_r, kappa))
        }
    }
    .map_err(model_err("port"))?;
    let sweep = linspace(spec.sweep.start, spec.sweep.end, spec.sweep.points);
    let curve = dispersive_readout_curve(&port, spec.chi, &sweep).map_err(model_err("chi"))?;
    let rows = (0..sweep.len())
        .map(|i| {
            vec![
                sweep[i],
                curve.r_excited[i].re,
                curve.r_excited[i].im,
                curve.r_ground[i].re,
                curve.r_ground[i].im,
                curve.phase_separation[i],
            ]
        })
        .collect();
    let summary = json!({
        "omega_r": port.omega_r,
        "kappa": port.kappa,
        "chi": spec.chi,
        "max_phase_separation": curve.max_separation,
        "argmax_omega_d": curve.argmax,
    });
    Ok(Artifacts {
        csv_name: Some("readout.csv"),
        header: ["omega_d", "re_r_plus", "im_r_plus", "re_r_minus", "im_r_minus", "phase_sep"]
            .map(String::from)
            .to_vec(),
        rows,
        tables: Vec::new(),
        summary,
    })
}
