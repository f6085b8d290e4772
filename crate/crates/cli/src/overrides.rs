//! Command-line flags applied on top of a configuration document.
//!
//! Overrides edit the JSON tree before it is deserialized, so validation
//! errors and `spec_hash` both see the values that actually run.

use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub solver: Option<String>,
    pub trajectories: Option<usize>,
    pub paths: Option<usize>,
    pub k: Option<f64>,
    /// `exp:gamma=X` or `nexp:gamma=X`.
    pub kernel: Option<String>,
    pub chi: Option<f64>,
    pub kappa: Option<f64>,
    pub omega_r: Option<f64>,
    /// `start:stop:points`.
    pub sweep: Option<String>,
}

fn flag_err(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("--{flag}: {msg}"))
}

fn object<'a>(v: &'a mut Value, what: &str) -> Result<&'a mut Map<String, Value>, CliError> {
    v.as_object_mut().ok_or_else(|| CliError::Config(format!("at `{what}`: expected an object")))
}

fn child<'a>(parent: &'a mut Map<String, Value>, key: &str) -> &'a mut Value {
    let slot = parent.entry(key.to_string()).or_insert_with(|| json!({}));
    if slot.is_null() {
        *slot = json!({});
    }
    slot
}

/// Applies solver and kernel flags to an experiment document. A `--solver`
/// that changes the kind starts from an empty solver block.
pub fn apply_simulate(doc: &mut Value, o: &Overrides) -> Result<(), CliError> {
    let root = object(doc, "")?;
    if let Some(seed) = o.seed {
        root.insert("seed".into(), json!(seed));
    }
    if o.solver.is_some() || o.trajectories.is_some() || o.paths.is_some() || o.k.is_some() {
        let solver = object(child(root, "solver"), "solver")?;
        if let Some(kind) = &o.solver {
            if solver.get("kind").and_then(Value::as_str) != Some(kind.as_str()) {
                solver.clear();
                solver.insert("kind".into(), json!(kind));
            }
        }
        if let Some(n) = o.trajectories {
            solver.insert("trajectories".into(), json!(n));
        }
        if let Some(n) = o.paths {
            solver.insert("paths".into(), json!(n));
        }
        if let Some(k) = o.k {
            solver.insert("k".into(), json!(k));
        }
    }
    if let Some(text) = &o.kernel {
        let kernel = parse_kernel(text)?;
        let noise = object(child(root, "noise"), "noise")?;
        let memory = object(child(noise, "memory"), "noise.memory")?;
        memory.insert("kernel".into(), kernel);
    }
    Ok(())
}

fn parse_kernel(text: &str) -> Result<Value, CliError> {
    let (kind, rest) = text.split_once(':').ok_or_else(|| flag_err("kernel", "expected `exp:gamma=X` or `nexp:gamma=X`"))?;
    let kind = match kind {
        "exp" => "exponential",
        "nexp" => "normalized_exponential",
        other => return Err(flag_err("kernel", format!("unknown kernel `{other}` (choices: exp, nexp)"))),
    };
    let gamma = rest
        .strip_prefix("gamma=")
        .ok_or_else(|| flag_err("kernel", "expected `gamma=X` after the kernel kind"))?
        .parse::<f64>()
        .map_err(|e| flag_err("kernel", e))?;
    Ok(json!({"kind": kind, "gamma": gamma}))
}

/// Applies readout flags. Without a configuration the document starts empty
/// and a missing `--omega-r` means the sweep is measured from the bare
/// resonator frequency.
pub fn apply_readout(doc: &mut Value, o: &Overrides) -> Result<(), CliError> {
    let root = object(doc, "")?;
    root.entry("schema_version").or_insert(json!(crate::config::SCHEMA_VERSION));
    if let Some(chi) = o.chi {
        root.insert("chi".into(), json!(chi));
    }
    if o.kappa.is_some() || (o.omega_r.is_some() && root.contains_key("port")) {
        let port = object(child(root, "port"), "port")?;
        if let Some(kappa) = o.kappa {
            // an explicit loss rate replaces a circuit-parameter port
            if port.get("kind").and_then(Value::as_str) != Some("direct") {
                let omega_r = port.get("omega_r").cloned();
                port.clear();
                port.insert("kind".into(), json!("direct"));
                if let Some(w) = omega_r {
                    port.insert("omega_r".into(), w);
                }
            }
            port.insert("kappa".into(), json!(kappa));
        }
        if let Some(w) = o.omega_r {
            port.insert("omega_r".into(), json!(w));
        }
        if port.get("kind").and_then(Value::as_str) == Some("direct") {
            port.entry("omega_r").or_insert(json!(0.0));
        }
    }
    if let Some(text) = &o.sweep {
        root.insert("sweep".into(), parse_sweep(text)?);
    }
    Ok(())
}

fn parse_sweep(text: &str) -> Result<Value, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, end, points] = parts[..] else {
        return Err(flag_err("sweep", "expected `start:stop:points`"));
    };
    let start: f64 = start.parse().map_err(|e| flag_err("sweep", format!("start: {e}")))?;
    let end: f64 = end.parse().map_err(|e| flag_err("sweep", format!("stop: {e}")))?;
    let points: usize = points.parse().map_err(|e| flag_err("sweep", format!("points: {e}")))?;
    Ok(json!({"start": start, "end": end, "points": points}))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_switch_drops_stale_fields() {
        let mut doc = json!({"solver": {"kind": "mcwf", "trajectories": 10}});
        let o = Overrides { solver: Some("sse".into()), paths: Some(4), k: Some(0.5), ..Default::default() };
        apply_simulate(&mut doc, &o).unwrap();
        assert_eq!(doc["solver"], json!({"kind": "sse", "paths": 4, "k": 0.5}));
    }

    #[test]
    fn kernel_and_sweep_syntax() {
        assert_eq!(parse_kernel("nexp:gamma=2").unwrap(), json!({"kind": "normalized_exponential", "gamma": 2.0}));
        assert!(parse_kernel("gauss:gamma=2").is_err());
        assert!(parse_kernel("exp:g=2").is_err());
        assert_eq!(parse_sweep("-1:1.5:11").unwrap(), json!({"start": -1.0, "end": 1.5, "points": 11}));
        assert!(parse_sweep("1:2").is_err());
    }

    #[test]
    fn kappa_replaces_circuit_port() {
        let mut doc = json!({"port": {"kind": "circuit", "z_tml": 50.0, "c_k": 1.0, "c_r": 2.0, "omega_r": 7.0}});
        apply_readout(&mut doc, &Overrides { kappa: Some(0.3), ..Default::default() }).unwrap();
        assert_eq!(doc["port"], json!({"kind": "direct", "omega_r": 7.0, "kappa": 0.3}));
    }
}
