use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The continued formfactor was requested outside the declared holomorphy sector.
    #[error("sector error: {0}")]
    Sector(String),

    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },

    /// Adaptive quadrature ran out of subdivisions. The best estimate is kept.
    #[error("quadrature missed tolerance {tol:e}: estimate {value}, error estimate {abs_error:e}")]
    Accuracy {
        value: Complex64,
        abs_error: f64,
        tol: f64,
    },

    #[error("resolvent denominator vanishes at {zeta} (|D| = {magnitude:e})")]
    NearPole { zeta: Complex64, magnitude: f64 },

    #[error("pole search did not converge after {iterations} iterations (last {last}, |D+| = {residual:e})")]
    Convergence {
        last: Complex64,
        residual: f64,
        iterations: usize,
    },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("degenerate derivative: |1 + k^2 rho dG/dzeta| = {0:e}")]
    DegenerateDerivative(f64),

    #[error("resonance curve incomplete, failed at x = {failed:?}")]
    PartialCurve { failed: Vec<f64> },

    #[error("spectral density is a point mass at kappa = 0; use the free evolution exp(-i x t)")]
    DegenerateDensity,

    #[error("pole {pole} lies below the rotated ray at angle {theta}; use a smaller rotation")]
    RotationAngle { pole: Complex64, theta: f64 },

    #[error("no exponential window: C6 k^4 eta2 = {0} exceeds 1/e")]
    NoWindow(f64),

    #[error("critical coupling: |d_nu^x| = {0:e}, tail formula invalid")]
    CriticalCoupling(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
