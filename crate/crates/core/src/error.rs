//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain value failed validation (negative correlation time, drive
    /// depth exceeding the carrier, probabilities outside [0, 1], ...).
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// Adaptive quadrature exhausted its interval budget. Carries the worst
    /// remaining interval for diagnosis.
    #[error(
        "quadrature did not converge: abs tol {tol:.3e}, achieved {achieved:.3e} \
         after {evals} evaluations; worst interval [{lo:.6e}, {hi:.6e}]"
    )]
    Quadrature {
        tol: f64,
        achieved: f64,
        evals: usize,
        lo: f64,
        hi: f64,
    },

    /// Differentiating a sampled table is unstable at the current grid
    /// density.
    #[error(
        "time grid too coarse for stable differentiation: Richardson \
         disagreement {disagreement:.3e} exceeds {tol:.3e} near t = {at:.6e}"
    )]
    GridTooCoarse {
        disagreement: f64,
        tol: f64,
        at: f64,
    },

    /// Step halving did not bring the propagation observables within
    /// tolerance.
    #[error(
        "propagation did not converge: observable change {achieved:.3e} \
         exceeds per-step budget {tol:.3e} after {halvings} halvings"
    )]
    PropagationConvergence {
        tol: f64,
        achieved: f64,
        halvings: usize,
    },

    /// Requested Hilbert-space dimension exceeds the configured cap.
    #[error("Hilbert dimension {required} exceeds cap {cap}; raise the cap to at least {required}")]
    DimensionCap { required: usize, cap: usize },

    /// A selective measurement outcome has vanishing probability, so the
    /// conditional state is undefined.
    #[error("conditional state undefined: outcome probability {p:.3e} below threshold")]
    ZeroProbability { p: f64 },

    /// A closed-cycle computation could not reach a periodic state.
    #[error("cycle closure not achieved: |x(T) - x(0)| = {err:.3e} exceeds {tol:.3e}")]
    CycleClosure { err: f64, tol: f64 },

    /// Any other numerical failure (flagged second-law violations,
    /// eigensolver breakdowns, ...).
    #[error("{0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            why: why.into(),
        }
    }
}
