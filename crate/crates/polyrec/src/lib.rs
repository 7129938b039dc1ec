//! Exact arithmetic for recursively defined sequences.
//!
//! The crate covers sequence families defined by systems of recurrence
//! equations whose step functions are linear forms, polynomials or ratios of
//! polynomials, together with the analysis tooling built on top of them:
//!
//! - [`poly`]: multivariate/univariate polynomial arithmetic over the
//!   rationals and over prime fields; the common currency of everything else.
//! - [`engines`]: sequence definitions and exact evaluators, stock example
//!   systems, and closed-form oracle sequences.
//! - [`convert`]: conversions between single recurrences and first-order
//!   systems, and affine-to-linear normalization.
//! - [`normalize`]: transforms making a system integer-initial, homogeneous
//!   of one degree, and integer-coefficient, with the scaling bookkeeping.
//! - [`modular`]: reduction mod p, exact cycle detection on the finite state
//!   space, residue reconstruction, and Catalan divisibility blocks.
//! - [`cancelling`]: iterated step polynomials, window-polynomial search and
//!   verification, and the `n^n` refutation machinery.
//! - [`automata`]: weighted unary automata, weighted grammars and the
//!   quantifier fragment evaluator.
//! - [`dsl`]: the textual sequence-definition format and expression parser.
//! - [`cli`]: subcommand dispatch for the `polyrec` binary.
//!
//! Everything is exact: coefficients and values are arbitrary-precision
//! rationals, never floats.

pub mod automata;
pub mod cancelling;
pub mod cli;
pub mod convert;
pub mod dsl;
pub mod engines;
pub mod linalg;
pub mod modarith;
pub mod modular;
pub mod normalize;
pub mod poly;

pub use engines::{
    builtin, builtin_by_name, Builtin, EngineError, EvalLimits, LinearRecurrence, OracleSequence,
    PolySystem, RationalSystem, SequenceOracle, SimpleRecurrence,
};
pub use poly::{ModPoly, Monomial, MultiPoly, PolyError, Rat, UniPoly};
