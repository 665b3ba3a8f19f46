//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the simulation modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An input parameter is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested regime is excluded by the model (for example a
    /// probability density that would not be positive definite).
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// A well member whose interior amplitude denominator vanishes.
    #[error("singular well member: cos(k1*x0) = 0 at k1 = {k1}")]
    SingularMember { k1: f64 },

    /// The closed-form member amplitude changes sign or vanishes here.
    #[error("flagged well member: cos(k1*x0) <= 0 at k1 = {k1} (formula value {value})")]
    FlaggedAmplitude { k1: f64, value: f64 },

    /// A spectral grid does not span enough of the requested packet.
    #[error("spectrum truncated: k grid spans [{k_lo}, {k_hi}] but the packet needs [{need_lo}, {need_hi}]")]
    SpectrumTruncated {
        k_lo: f64,
        k_hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    /// A spatial grid cannot represent the requested wave numbers.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// The nonlinear time stepper failed to converge within its
    /// fixed-point iteration budget.
    #[error("time step failed: fixed-point iteration did not converge within {max_iters} iterations (residual {residual})")]
    StepFailure { max_iters: usize, residual: f64 },

    /// The interference factor is evaluated too close to one of its poles.
    #[error("interference factor singular near delta_phi = {phase}: poles at {pole_a} and {pole_b} rad")]
    SingularPhase { phase: f64, pole_a: f64, pole_b: f64 },

    /// Destructive interference drove the superposed density below the floor.
    #[error("destructive interference: |psi_1 + psi_2|^2 = {density} is below the floor {floor}")]
    DestructiveInterference { density: f64, floor: f64 },

    /// The magnetic interaction model would require a velocity change on
    /// the order of the beam velocity itself.
    #[error("beam-stopping regime: B_ext^2 = {b_ext_sq} exceeds rho_bar * u0^2 = {scale}")]
    BeamStopping { b_ext_sq: f64, scale: f64 },

    /// A matrix that must be Hermitian is not.
    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry}")]
    NotHermitian { max_asymmetry: f64 },

    /// Configuration file could not be parsed.
    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    /// A CLI or config parameter is missing or has the wrong type.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Output files could not be written.
    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;
