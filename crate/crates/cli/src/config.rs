//! Configuration documents. Every struct rejects unknown keys.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sqdyn::circuits::{CircuitModel, CircuitParams};
use sqdyn::lindblad::Method;
use sqdyn::noise::{ControlParameter, NoiseSpectrum};
use sqdyn::nonmarkov::Kernel;
use sqdyn::stochastic::Scheme;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalOperator {
    pub local: String,
    pub subsystem: usize,
}

/// `"sz"`, `"P1"`, `{"local": "a", "subsystem": 0}` or an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Named(String),
    Local(LocalOperator),
    Matrix(MatrixSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub amplitude: f64,
    pub omega: f64,
    #[serde(default = "default_drive_operator")]
    pub operator: OperatorSpec,
}

fn default_drive_operator() -> OperatorSpec {
    OperatorSpec::Named("sx".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `(ω_q/2)σz`, optionally driven.
    Qubit {
        omega_q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drive: Option<DriveSpec>,
    },
    /// Jaynes–Cummings oscillator ⊗ qubit.
    Jc { omega_c: f64, omega_q: f64, g: f64, nmax: usize },
    /// Lowest `levels` eigenenergies of a circuit, measured from the ground state.
    Circuit { params: CircuitParams, model: CircuitModel, levels: usize },
    Matrix {
        dims: Vec<usize>,
        hamiltonian: MatrixSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drive: Option<DriveSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub operator: OperatorSpec,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub operator: OperatorSpec,
    pub spectrum: NoiseSpectrum,
}

/// Memory part of a post-Markovian model: qubit dephasing at `dephasing_rate`
/// weighted by `kernel`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemorySpec {
    pub dephasing_rate: f64,
    pub kernel: Kernel,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub channels: Vec<ChannelSpec>,
    #[serde(default)]
    pub couplings: Vec<CouplingEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<MemorySpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffSpec {
    #[default]
    Auto,
    None,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmeSchemeSpec {
    #[default]
    Kraus,
    EulerMaruyama,
}

fn one() -> usize {
    1
}

fn default_floquet_steps() -> usize {
    sqdyn::floquet::DEFAULT_STEPS
}

fn default_kmax() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverSpec {
    Lindblad {
        #[serde(default)]
        method: Method,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rtol: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        atol: Option<f64>,
    },
    Redfield {
        #[serde(default)]
        secular_cutoff: CutoffSpec,
    },
    Mcwf {
        trajectories: usize,
        /// Write every jump to `jumps.csv`.
        #[serde(default)]
        export_jumps: bool,
    },
    Floquet {
        #[serde(default = "default_floquet_steps")]
        steps: usize,
        #[serde(default = "default_kmax")]
        kmax: usize,
    },
    Pmme {},
    /// Unravelling of the noise channels; with `k` set, continuous σz
    /// measurement of a qubit instead.
    Sse {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(default = "one")]
        paths: usize,
        #[serde(default)]
        scheme: Scheme,
        #[serde(default = "one")]
        substeps: usize,
        /// Write the measurement records to `records.csv` (needs `k`).
        #[serde(default)]
        export_records: bool,
    },
    Sme {
        k: f64,
        #[serde(default = "one")]
        paths: usize,
        #[serde(default)]
        scheme: SmeSchemeSpec,
        #[serde(default = "one")]
        substeps: usize,
        #[serde(default)]
        export_records: bool,
    },
}

impl SolverSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SolverSpec::Lindblad { .. } => "lindblad",
            SolverSpec::Redfield { .. } => "redfield",
            SolverSpec::Mcwf { .. } => "mcwf",
            SolverSpec::Floquet { .. } => "floquet",
            SolverSpec::Pmme {} => "pmme",
            SolverSpec::Sse { .. } => "sse",
            SolverSpec::Sme { .. } => "sme",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, SolverSpec::Mcwf { .. } | SolverSpec::Sse { .. } | SolverSpec::Sme { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn times(&self) -> Vec<f64> {
        sqdyn::ode::linspace(self.t_start, self.t_end, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Ground,
    Excited,
    Plus,
    Minus,
    Basis(usize),
    /// `[[re, im], ...]`, normalized on use.
    Amplitudes(Vec<[f64; 2]>),
    Density(MatrixSpec),
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Ground
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub name: String,
    pub operator: OperatorSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    T1,
    Ramsey,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub observable: String,
    pub model: FitModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_hint: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub system: SystemSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub solver: SolverSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub initial_state: StateSpec,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub fit: Option<FitSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersiveSpec {
    pub omega_r: f64,
    /// Charge-operator coupling strength `g0`, giving `g_ij = g0 ⟨i|n|j⟩`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_coupling: Option<f64>,
    /// Explicit coupling matrix over the computed levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<MatrixSpec>,
    #[serde(default = "default_dispersive_factor")]
    pub factor: f64,
}

fn default_dispersive_factor() -> f64 {
    sqdyn::circuits::DEFAULT_DISPERSIVE_FACTOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub schema_version: u32,
    pub params: CircuitParams,
    pub model: CircuitModel,
    pub levels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersive: Option<DispersiveSpec>,
}

fn default_delta() -> f64 {
    1e-4
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSpec {
    pub schema_version: u32,
    pub params: CircuitParams,
    pub model: CircuitModel,
    pub parameter: ControlParameter,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub spectrum: NoiseSpectrum,
    /// Treat `spectrum` as two-sided and symmetrize it for the golden rule.
    #[serde(default = "yes")]
    pub two_sided: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloquetSpec {
    pub schema_version: u32,
    pub system: SystemSpec,
    #[serde(default = "default_floquet_steps")]
    pub steps: usize,
    #[serde(default = "default_kmax")]
    pub kmax: usize,
    #[serde(default)]
    pub couplings: Vec<CouplingEntry>,
    /// Filter-function curves `F(ω, t)` over a frequency sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub time: f64,
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PortSpec {
    Direct { omega_r: f64, kappa: f64 },
    Circuit { z_tml: f64, c_k: f64, c_r: f64, omega_r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutSpec {
    pub schema_version: u32,
    pub port: PortSpec,
    pub chi: f64,
    pub sweep: SweepSpec,
}

fn located(e: serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let path = e.path().to_string();
    let inner = e.into_inner();
    if path.is_empty() || path == "." {
        CliError::Config(inner.to_string())
    } else {
        CliError::Config(format!("at `{path}`: {inner}"))
    }
}

/// Parses a JSON document. Syntax errors carry line and column; type errors
/// carry the path to the offending field.
pub fn parse_str<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(located)
}

pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse_str(&read_text(path)?)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

/// Raw document, for edits before typed parsing.
pub fn read_value(path: &Path) -> Result<serde_json::Value, CliError> {
    parse_str(&read_text(path)?)
}

/// Typed parse of an already-loaded document, with the same error paths as
/// [`parse_str`].
pub fn parse_value<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(located)
}

fn check_version(v: u32) -> Result<(), CliError> {
    if v != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "at `schema_version`: unsupported schema version {v} (this build reads {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

fn semantic(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("at `{path}`: {msg}"))
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        check_version(self.schema_version)?;
        let g = &self.grid;
        if g.points < 2 {
            return Err(semantic("grid.points", format!("need at least 2 points, got {}", g.points)));
        }
        if !(g.t_start.is_finite() && g.t_end.is_finite() && g.t_end > g.t_start) {
            return Err(semantic("grid", "t_end must be finite and larger than t_start"));
        }
        if self.solver.is_stochastic() && self.seed.is_none() {
            return Err(semantic("seed", "seed required for stochastic solvers"));
        }
        match &self.solver {
            SolverSpec::Mcwf { trajectories, .. } if *trajectories == 0 => {
                return Err(semantic("solver.trajectories", "must be at least 1"));
            }
            SolverSpec::Sse { paths, substeps, .. } | SolverSpec::Sme { paths, substeps, .. }
                if *paths == 0 || *substeps == 0 =>
            {
                return Err(semantic("solver", "paths and substeps must be at least 1"));
            }
            SolverSpec::Pmme {} if self.noise.memory.is_none() => {
                return Err(semantic("noise.memory", "the pmme solver needs a memory section"));
            }
            SolverSpec::Redfield { .. } | SolverSpec::Floquet { .. } if self.noise.couplings.is_empty() => {
                return Err(semantic("noise.couplings", format!("the {} solver needs at least one coupling", self.solver.name())));
            }
            _ => {}
        }
        let mut names = std::collections::BTreeSet::new();
        for (i, o) in self.observables.iter().enumerate() {
            if o.name.is_empty() || o.name == "t" || o.name.contains([',', '\n', '"']) {
                return Err(semantic(&format!("observables[{i}].name"), format!("invalid column name {:?}", o.name)));
            }
            if !names.insert(o.name.as_str()) {
                return Err(semantic(&format!("observables[{i}].name"), format!("duplicate name {:?}", o.name)));
            }
        }
        if let Some(fit) = &self.fit {
            if !names.contains(fit.observable.as_str()) {
                return Err(semantic("fit.observable", format!("no observable named {:?}", fit.observable)));
            }
        }
        Ok(())
    }
}

impl CircuitSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        check_version(self.schema_version)?;
        if self.levels < 2 {
            return Err(semantic("levels", "need at least 2 levels"));
        }
        if let Some(d) = &self.dispersive {
            if d.charge_coupling.is_some() == d.couplings.is_some() {
                return Err(semantic("dispersive", "give exactly one of charge_coupling and couplings"));
            }
            if d.charge_coupling.is_some() && !matches!(self.model, CircuitModel::Charge { .. }) {
                return Err(semantic("dispersive.charge_coupling", "charge coupling needs the charge basis"));
            }
        }
        Ok(())
    }
}

impl RatesSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        check_version(self.schema_version)
    }
}

impl FloquetSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        check_version(self.schema_version)?;
        match &self.system {
            SystemSpec::Qubit { drive: Some(_), .. } | SystemSpec::Matrix { drive: Some(_), .. } => {}
            _ => return Err(semantic("system.drive", "Floquet analysis needs a periodic drive")),
        }
        if let Some(f) = &self.filter {
            if self.couplings.is_empty() {
                return Err(semantic("filter", "filter curves need at least one coupling"));
            }
            if !(f.time > 0.0) || f.points < 2 || !(f.end > f.start) {
                return Err(semantic("filter", "need time > 0, at least 2 points and end > start"));
            }
        }
        Ok(())
    }
}

impl ReadoutSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        check_version(self.schema_version)?;
        if self.sweep.points < 2 || !(self.sweep.end > self.sweep.start) {
            return Err(semantic("sweep", "need at least 2 points and end > start"));
        }
        Ok(())
    }
}
