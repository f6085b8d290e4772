//! Turning configuration sections into library objects.

use nalgebra::DMatrix;
use sqdyn::circuits::{jc_hamiltonian, CircuitModel, CircuitParams};
use sqdyn::lindblad::{Drive, Hamiltonian};
use sqdyn::{c, ops, Channel, DensityMatrix, HilbertSpace, Ket, Operator, C64};

use crate::config::{ChannelSpec, DriveSpec, MatrixSpec, OperatorSpec, StateSpec, SystemSpec};
use crate::error::CliError;

fn cfg(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("at `{path}`: {msg}"))
}

pub fn matrix(spec: &MatrixSpec, n: usize, path: &str) -> Result<DMatrix<C64>, CliError> {
    if spec.re.len() != n || spec.re.iter().any(|r| r.len() != n) {
        return Err(cfg(path, format!("expected a {n}x{n} matrix")));
    }
    if let Some(im) = &spec.im {
        if im.len() != n || im.iter().any(|r| r.len() != n) {
            return Err(cfg(&format!("{path}.im"), format!("expected a {n}x{n} matrix")));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| c(spec.re[i][j], spec.im.as_ref().map_or(0.0, |m| m[i][j]))))
}

fn matrix_operator(spec: &MatrixSpec, space: &HilbertSpace, path: &str) -> Result<Operator, CliError> {
    Operator::new(matrix(spec, space.total(), path)?, space.clone()).map_err(|e| cfg(path, e))
}

fn named(name: &str, d: usize, path: &str) -> Result<Operator, CliError> {
    let need_qubit = |op: Operator| {
        if d == 2 {
            Ok(op)
        } else {
            Err(cfg(path, format!("`{name}` needs a two-level space, got dimension {d}")))
        }
    };
    match name {
        "sx" => need_qubit(ops::sigma_x()),
        "sy" => need_qubit(ops::sigma_y()),
        "sz" => need_qubit(ops::sigma_z()),
        "sm" => need_qubit(ops::sigma_minus()),
        "sp" => need_qubit(ops::sigma_plus()),
        "a" => Ok(ops::destroy(d)),
        "adag" => Ok(ops::create(d)),
        "n" => Ok(ops::number(d)),
        "I" => Ok(ops::identity(d)),
        _ => {
            if let Some(k) = name.strip_prefix('P').and_then(|s| s.parse::<usize>().ok()) {
                if k < d {
                    return Ok(ops::projector(d, k));
                }
                return Err(cfg(path, format!("projector {name} out of range for dimension {d}")));
            }
            Err(cfg(
                path,
                format!("unknown operator {name:?}; expected one of sx, sy, sz, sm, sp, a, adag, n, I, P<k>"),
            ))
        }
    }
}

pub fn operator(spec: &OperatorSpec, space: &HilbertSpace, path: &str) -> Result<Operator, CliError> {
    match spec {
        OperatorSpec::Named(name) => {
            let op = named(name, space.total(), path)?;
            Operator::new(op.into_matrix(), space.clone()).map_err(|e| cfg(path, e))
        }
        OperatorSpec::Local(local) => {
            let dims = space.dims();
            if local.subsystem >= dims.len() {
                return Err(cfg(
                    &format!("{path}.subsystem"),
                    format!("subsystem {} out of range for {} subsystems", local.subsystem, dims.len()),
                ));
            }
            let op = named(&local.local, dims[local.subsystem], path)?;
            let op = Operator::new(op.into_matrix(), HilbertSpace::qudit(dims[local.subsystem])).map_err(|e| cfg(path, e))?;
            op.embed(space, local.subsystem).map_err(|e| cfg(path, e))
        }
        OperatorSpec::Matrix(m) => matrix_operator(m, space, path),
    }
}

pub fn hamiltonian(system: &SystemSpec) -> Result<Hamiltonian, CliError> {
    match system {
        SystemSpec::Qubit { omega_q, drive } => {
            let h0 = ops::sigma_z().scaled(c(omega_q / 2.0, 0.0));
            with_drive(h0, drive.as_ref())
        }
        SystemSpec::Jc { omega_c, omega_q, g, nmax } => {
            let h = jc_hamiltonian(*omega_c, *omega_q, *g, *nmax).map_err(|e| cfg("system", e))?;
            Ok(h.into())
        }
        SystemSpec::Circuit { params, model, levels } => Ok(circuit_hamiltonian(params, model, *levels)?.into()),
        SystemSpec::Matrix { dims, hamiltonian, drive } => {
            let space = HilbertSpace::new(dims.clone()).map_err(|e| cfg("system.dims", e))?;
            let h0 = matrix_operator(hamiltonian, &space, "system.hamiltonian")?;
            h0.ensure_hermitian().map_err(|e| cfg("system.hamiltonian", e))?;
            with_drive(h0, drive.as_ref())
        }
    }
}

fn with_drive(h0: Operator, drive: Option<&DriveSpec>) -> Result<Hamiltonian, CliError> {
    match drive {
        None => Ok(h0.into()),
        Some(d) => {
            let op = operator(&d.operator, h0.space(), "system.drive.operator")?;
            op.ensure_hermitian().map_err(|e| cfg("system.drive.operator", e))?;
            Hamiltonian::driven(h0, vec![(op, Drive::cosine(d.amplitude, d.omega))]).map_err(|e| cfg("system.drive", e))
        }
    }
}

pub fn circuit_hamiltonian(params: &CircuitParams, model: &CircuitModel, levels: usize) -> Result<Operator, CliError> {
    if levels < 2 {
        return Err(cfg("system.levels", "need at least 2 levels"));
    }
    let spec = model.spectrum(params, levels).map_err(|e| cfg("system", e))?;
    let e0 = spec.energies[0];
    let shifted: Vec<f64> = spec.energies.iter().map(|e| e - e0).collect();
    Operator::diagonal(&HilbertSpace::qudit(levels), &shifted).map_err(|e| cfg("system", e))
}

pub fn channels(specs: &[ChannelSpec], space: &HilbertSpace) -> Result<Vec<Channel>, CliError> {
    specs
        .iter()
        .enumerate()
        .map(|(i, ch)| {
            let path = format!("noise.channels[{i}]");
            let op = operator(&ch.operator, space, &format!("{path}.operator"))?;
            Channel::new(op, ch.rate).map_err(|e| cfg(&format!("{path}.rate"), e))
        })
        .collect()
}

pub fn initial_ket(spec: &StateSpec, space: &HilbertSpace) -> Result<Ket, CliError> {
    let n = space.total();
    let ket = match spec {
        StateSpec::Ground => Ket::basis(space, 0),
        StateSpec::Excited => {
            if n < 2 {
                return Err(cfg("initial_state", "excited state needs at least two levels"));
            }
            Ket::basis(space, 1)
        }
        StateSpec::Plus | StateSpec::Minus => {
            if n != 2 {
                return Err(cfg("initial_state", "plus/minus states need a two-level system"));
            }
            if matches!(spec, StateSpec::Plus) {
                Ket::plus()
            } else {
                Ket::minus()
            }
        }
        StateSpec::Basis(k) => {
            if *k >= n {
                return Err(cfg("initial_state.basis", format!("level {k} out of range for dimension {n}")));
            }
            Ket::basis(space, *k)
        }
        StateSpec::Amplitudes(a) => {
            if a.len() != n {
                return Err(cfg("initial_state.amplitudes", format!("expected {n} amplitudes, got {}", a.len())));
            }
            let amps: Vec<C64> = a.iter().map(|[re, im]| c(*re, *im)).collect();
            let raw = Ket::from_amplitudes(&amps).map_err(|e| cfg("initial_state.amplitudes", e))?;
            raw.normalized().map_err(|e| cfg("initial_state.amplitudes", e))?
        }
        StateSpec::Density(_) => {
            return Err(cfg("initial_state", "this solver propagates state vectors; give a pure state"));
        }
    };
    // Re-tag with the composite space so subsystem structure is kept.
    Ket::new(ket.into_amplitudes(), space.clone()).map_err(|e| cfg("initial_state", e))
}

pub fn initial_density(spec: &StateSpec, space: &HilbertSpace) -> Result<DensityMatrix, CliError> {
    match spec {
        StateSpec::Density(m) => {
            let op = matrix_operator(m, space, "initial_state.density")?;
            DensityMatrix::new(op.into_matrix(), space.clone()).map_err(|e| cfg("initial_state.density", e))
        }
        other => DensityMatrix::from_ket(&initial_ket(other, space)?).map_err(|e| cfg("initial_state", e)),
    }
}
