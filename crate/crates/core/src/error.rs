use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("operator is not Hermitian (max |A - A†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("negative rate {rate} for {what}")]
    NegativeRate { what: String, rate: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectrum is singular at omega = {omega}")]
    SingularSpectrum { omega: f64 },

    #[error(
        "dephasing rate diverges: spectrum is singular at omega = 0 while D_z = {d_z:.3e}; \
         use the Floquet or post-Markovian solvers for 1/f dephasing"
    )]
    SingularDephasing { d_z: f64 },

    #[error(
        "dispersive approximation invalid for levels ({i}, {j}): |detuning| = {detuning:.4e} \
         is not larger than {factor} x |g| = {coupling:.4e}"
    )]
    NearResonant {
        i: usize,
        j: usize,
        detuning: f64,
        coupling: f64,
        factor: f64,
    },

    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("maximum number of integrator steps ({0}) exceeded")]
    TooManySteps(usize),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("dead jump channel at t = {t}: all channel weights vanish (state = {state})")]
    DeadChannel { t: f64, state: String },

    #[error("did not converge: {0}")]
    NotConverged(String),

    #[error("hamiltonian is not periodic with period {period}: deviation {deviation:.3e} at t = {t}")]
    NotPeriodic { period: f64, t: f64, deviation: f64 },

    #[error("memory budget exceeded: {required} bytes needed, limit {limit}")]
    MemoryBudget { required: usize, limit: usize },

    #[error("time step too large: {0}")]
    StepTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
