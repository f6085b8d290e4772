//! Open-system dynamics of superconducting qubits.
//!
//! Dense complex linear algebra ([`linalg`]), circuit and cavity-QED
//! Hamiltonians ([`circuits`]), noise spectra and golden-rule rates
//! ([`noise`]), and a family of solvers: Lindblad, Bloch-Redfield,
//! post-Markovian, Monte Carlo wave function, Floquet-Markov and stochastic
//! measurement dynamics. [`inout`] covers cavity readout at mean-field level
//! and [`analysis`] extracts T1/T2 from solver output.

pub mod analysis;
pub mod error;
pub mod circuits;
pub mod floquet;
pub mod inout;
pub mod linalg;
pub mod lindblad;
pub mod mcwf;
pub mod noise;
pub mod nonmarkov;
pub mod ode;
pub mod redfield;
pub mod rng;
pub mod stochastic;

pub use error::{Error, Result};
pub use linalg::*;
