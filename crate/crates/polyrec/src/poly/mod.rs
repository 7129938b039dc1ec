//! Exact polynomial arithmetic over the rationals and over prime fields.
//!
//! Coefficients are always-reduced `BigRational`s; there is no floating point
//! anywhere. Monomials follow a single global graded-lexicographic order so
//! printing, equality and linear-system column layouts are deterministic.

mod modp;
mod monomial;
mod multi;
mod uni;

pub use modp::ModPoly;
pub use monomial::{monomials_up_to_degree, Monomial};
pub use multi::MultiPoly;
pub use uni::UniPoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// `a/b` as a reduced rational.
pub fn rat(a: i64, b: i64) -> Rat {
    Rat::new(BigInt::from(a), BigInt::from(b))
}

/// An integer as a rational.
pub fn int(a: i64) -> Rat {
    Rat::from(BigInt::from(a))
}

/// `r^e` for a nonnegative exponent.
pub fn rat_pow(r: &Rat, e: u32) -> Rat {
    if e == 0 {
        return int(1);
    }
    // Numerator and denominator stay coprime under powering.
    Rat::new_raw(r.numer().pow(e), r.denom().pow(e))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarcountMismatch(usize, usize),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("coefficient {0} is not an integer")]
    NonIntegerCoefficient(String),
    #[error("{0} is not prime")]
    NonPrimeModulus(u64),
    #[error("exponent overflow while multiplying monomials")]
    DegreeOverflow,
    #[error("term budget exceeded: more than {max_terms} monomials")]
    TermBudgetExceeded { max_terms: usize },
}

impl PolyError {
    /// Stable error name used by the CLI's machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            PolyError::VarcountMismatch(..) => "VarcountMismatch",
            PolyError::ArityMismatch { .. } => "ArityMismatch",
            PolyError::ZeroPolynomial => "ZeroPolynomial",
            PolyError::NonIntegerCoefficient(..) => "NonIntegerCoefficient",
            PolyError::NonPrimeModulus(..) => "NonPrimeModulus",
            PolyError::DegreeOverflow => "DegreeOverflow",
            PolyError::TermBudgetExceeded { .. } => "TermBudgetExceeded",
        }
    }
}
