use thiserror::Error;

/// Errors produced by series algebra, solvers and arithmetic constructions.
#[derive(Error, Debug)]
pub enum Error {
    #[error("series order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("inner series must have zero constant term")]
    ConstantTerm,

    #[error("leading-term requirement violated: {0}")]
    LeadingTerm(&'static str),

    #[error("vanishing linear part, series is not invertible")]
    NotInvertible,

    #[error("small divisor |1 - lambda^{exponent}| = {magnitude:e} below guard at (r,s)=({r},{s})")]
    SmallDivisor {
        r: usize,
        s: usize,
        exponent: i64,
        magnitude: f64,
    },

    #[error("insufficient precision: {0}")]
    PrecisionExhausted(String),

    #[error("factorial budget exceeded: {0}! refused (limit {1})")]
    FactorialBudget(u64, u64),

    #[error("series is not an involution (residual {0:e})")]
    NotInvolution(f64),

    #[error("series is not admissible: odd part of the diagonal residual is {0:e}")]
    NotAdmissible(f64),

    #[error("jet is not extendable: area defect at degree {0}")]
    JetNotExtendable(usize),

    #[error("decomposition residual {0:e} exceeds tolerance")]
    Decomposition(f64),

    #[error("fixed-point iteration failed to stabilize after {0} steps")]
    NoFixedPoint(usize),

    #[error("coefficient update at degree {0} no longer allowed (solver already past it)")]
    StaleCoefficient(usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code classification: guard failures (small divisors,
    /// precision, factorial budget) exit with 2, everything else with 1.
    pub fn is_guard_failure(&self) -> bool {
        matches!(
            self,
            Error::SmallDivisor { .. } | Error::PrecisionExhausted(_) | Error::FactorialBudget(..)
        )
    }
}
