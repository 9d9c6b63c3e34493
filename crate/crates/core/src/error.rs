use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {xi} lies outside the sector of analyticity |arg xi| < {theta0}")]
    OutOfSector { xi: Complex64, theta0: f64 },

    #[error("evaluation at {xi} would cross a branch cut")]
    BranchViolation { xi: Complex64 },

    #[error("decay exponent {gamma} too small for weight {weight} (need gamma > {})", 1.0 + *weight as f64)]
    SlowDecay { gamma: f64, weight: u32 },

    #[error("decay exponent {gamma} must exceed 2 for the Dirichlet criterion")]
    GammaTooSmall { gamma: f64 },

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("z = {z} lies outside the continuation sector (theta = {theta}, theta0 = {theta0})")]
    OutOfContinuationSector { z: Complex64, theta: f64, theta0: f64 },

    #[error("series did not reach tolerance within {max_terms} terms (majorant rate {rate})")]
    SlowConvergence { max_terms: usize, rate: f64 },

    #[error("mesh refinement disagreement {difference:e} exceeds tolerance {tol:e}")]
    MeshTooCoarse { difference: f64, tol: f64 },

    #[error("ODE stepper failure: {0}")]
    StepperFailure(String),

    #[error("shooting solution overflowed (log magnitude {log_magnitude})")]
    Overflow { log_magnitude: f64 },

    #[error("degenerate boundary factor: z = i cot(alpha) = {z}")]
    Degenerate { z: Complex64 },

    #[error("|Psi| = {value:e} below floor; m-function denominator degenerate")]
    DegenerateDenominator { value: f64 },

    #[error("contour too coarse: phase jump {jump} after refinement")]
    ContourTooCoarse { jump: f64 },

    #[error("box subdivision exceeded maximum depth {depth}")]
    MaxDepth { depth: usize },

    #[error("resonance track lost after parameter {last_param} (last z = {last_z})")]
    TrackLost { last_param: f64, last_z: Complex64 },

    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
