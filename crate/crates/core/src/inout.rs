//! Mean-field input-output theory for a single-port cavity.
//!
//! Frame rotates at the drive frequency, with detuning `Δ = ω_r − ω_d`.
//! Sign convention (Gardiner–Collett):
//!
//! ```text
//! d⟨a⟩/dt = −(iΔ + κ/2)⟨a⟩ − √κ β_in
//! b_out   = b_in + √κ ⟨a⟩
//! ```
//!
//! so the reflection coefficient is `r = 1 − κ/(iΔ + κ/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityPort {
    pub omega_r: f64,
    pub kappa: f64,
}

impl CavityPort {
    pub fn new(omega_r: f64, kappa: f64) -> Result<Self> {
        let port = CavityPort { omega_r, kappa };
        port.validate()?;
        Ok(port)
    }

    /// Port whose loss rate comes from the coupling capacitor and line impedance.
    pub fn from_circuit(z_tml: f64, c_k: f64, c_r: f64, omega_r: f64) -> Result<Self> {
        let kappa = photon_loss_rate(z_tml, c_k, c_r, omega_r)?;
        CavityPort::new(omega_r, kappa)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega_r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cavity frequency must be finite, got {}",
                self.omega_r
            )));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "photon-loss rate must be positive, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    pub fn detuning(&self, omega_d: f64) -> f64 {
        self.omega_r - omega_d
    }

    fn pole(&self, omega_d: f64) -> C64 {
        c(self.kappa / 2.0, self.detuning(omega_d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveTone {
    pub beta_in: C64,
    pub omega_d: f64,
}

impl DriveTone {
    pub fn new(beta_in: C64, omega_d: f64) -> Result<Self> {
        if !(beta_in.re.is_finite() && beta_in.im.is_finite() && omega_d.is_finite()) {
            return Err(Error::InvalidArgument(
                "drive amplitude and frequency must be finite".into(),
            ));
        }
        Ok(DriveTone { beta_in, omega_d })
    }
}

/// `κ = Z_tml C_k² ω_r² / C_r`.
pub fn photon_loss_rate(z_tml: f64, c_k: f64, c_r: f64, omega_r: f64) -> Result<f64> {
    for (name, v) in [("z_tml", z_tml), ("c_k", c_k), ("c_r", c_r), ("omega_r", omega_r)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(z_tml * c_k * c_k * omega_r * omega_r / c_r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CavityResponse {
    pub times: Vec<f64>,
    pub amplitudes: Vec<C64>,
    pub steady_state: C64,
}

pub fn steady_state_amplitude(port: &CavityPort, drive: &DriveTone) -> C64 {
    -port.kappa.sqrt() * drive.beta_in / port.pole(drive.omega_d)
}

/// Closed-form solution of the linear mean-field equation, starting from
/// `a0` at `grid[0]`.
pub fn mean_cavity_response(
    port: &CavityPort,
    drive: &DriveTone,
    grid: &[f64],
    a0: C64,
) -> Result<CavityResponse> {
    port.validate()?;
    let ss = steady_state_amplitude(port, drive);
    let pole = port.pole(drive.omega_d);
    let t0 = grid.first().copied().unwrap_or(0.0);
    let amplitudes = grid
        .iter()
        .map(|&t| ss + (a0 - ss) * (-pole * (t - t0)).exp())
        .collect();
    Ok(CavityResponse {
        times: grid.to_vec(),
        amplitudes,
        steady_state: ss,
    })
}

pub fn output_field(b_in: C64, a: C64, kappa: f64) -> C64 {
    b_in + kappa.sqrt() * a
}

pub fn reflection(port: &CavityPort, omega_d: f64) -> C64 {
    c(1.0, 0.0) - port.kappa / port.pole(omega_d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutCurve {
    pub omega_d: Vec<f64>,
    /// Reflection with the qubit in |g⟩ (cavity pulled to ω_r − χ).
    pub r_ground: Vec<C64>,
    /// Reflection with the qubit in |e⟩ (cavity pulled to ω_r + χ).
    pub r_excited: Vec<C64>,
    /// |arg(r_e / r_g)| at each drive frequency, in [0, π].
    pub phase_separation: Vec<f64>,
    pub max_separation: f64,
    pub argmax: Option<f64>,
}

/// Reflection curves for both qubit states under the dispersive pull `χ a†a σz`.
pub fn dispersive_readout_curve(port: &CavityPort, chi: f64, sweep: &[f64]) -> Result<ReadoutCurve> {
    port.validate()?;
    if !chi.is_finite() {
        return Err(Error::InvalidArgument(format!("chi must be finite, got {chi}")));
    }
    let ground = CavityPort { omega_r: port.omega_r - chi, ..*port };
    let excited = CavityPort { omega_r: port.omega_r + chi, ..*port };
    let r_ground: Vec<C64> = sweep.iter().map(|&w| reflection(&ground, w)).collect();
    let r_excited: Vec<C64> = sweep.iter().map(|&w| reflection(&excited, w)).collect();
    let phase_separation: Vec<f64> = r_ground
        .iter()
        .zip(&r_excited)
        .map(|(g, e)| (e * g.conj()).arg().abs())
        .collect();
    let mut max_separation = 0.0;
    let mut argmax = None;
    for (w, &s) in sweep.iter().zip(&phase_separation) {
        if argmax.is_none() || s > max_separation {
            max_separation = s;
            argmax = Some(*w);
        }
    }
    Ok(ReadoutCurve {
        omega_d: sweep.to_vec(),
        r_ground,
        r_excited,
        phase_separation,
        max_separation,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_rate_substitution() {
        assert_eq!(photon_loss_rate(2.0, 1.0, 4.0, 3.0).unwrap(), 4.5);
        assert!(photon_loss_rate(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(photon_loss_rate(1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn undriven_decay() {
        let port = CavityPort::new(5.0, 0.4).unwrap();
        let drive = DriveTone::new(c(0.0, 0.0), 5.3).unwrap();
        let grid: Vec<f64> = (0..50).map(|k| 0.2 * k as f64).collect();
        let a0 = c(0.6, -0.8);
        let resp = mean_cavity_response(&port, &drive, &grid, a0).unwrap();
        for (t, a) in grid.iter().zip(&resp.amplitudes) {
            assert!((a.norm() - (-0.2 * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn resonant_reflection() {
        let port = CavityPort::new(7.0, 0.3).unwrap();
        let r = reflection(&port, 7.0);
        assert!((r - c(-1.0, 0.0)).norm() < 1e-15);
        let beta = c(0.2, 0.1);
        let drive = DriveTone::new(beta, 7.0).unwrap();
        let a = steady_state_amplitude(&port, &drive);
        assert!((a.norm() - 2.0 * beta.norm() / 0.3f64.sqrt()).abs() < 1e-14);
        let out = output_field(beta, a, port.kappa);
        assert!((out + beta).norm() < 1e-14);
    }

    #[test]
    fn zero_chi_curves_coincide() {
        let port = CavityPort::new(7.0, 0.3).unwrap();
        let sweep: Vec<f64> = (0..21).map(|k| 6.5 + 0.05 * k as f64).collect();
        let curve = dispersive_readout_curve(&port, 0.0, &sweep).unwrap();
        assert_eq!(curve.r_ground, curve.r_excited);
        assert_eq!(curve.max_separation, 0.0);
    }
}
