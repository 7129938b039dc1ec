//! Closed-form reference sequences, used as ground truth when testing search
//! and non-membership tooling.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::{EngineError, SequenceOracle};
use crate::poly::Rat;

/// A total, deterministic map `n -> rational`.
///
/// `n^n` uses the convention `0^0 = 1`. Catalan numbers are computed from the
/// exact binomial `C(2n, n) / (n + 1)`.
#[derive(Clone)]
pub enum OracleSequence {
    NN,
    Catalan,
    Factorial,
    PowerTower,
    Custom {
        name: String,
        f: Arc<dyn Fn(u64) -> Rat + Send + Sync>,
    },
}

impl fmt::Debug for OracleSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OracleSequence({})", self.name())
    }
}

impl OracleSequence {
    /// Stable names used by the CLI and serialized documents.
    pub fn name(&self) -> &str {
        match self {
            OracleSequence::NN => "n^n",
            OracleSequence::Catalan => "catalan",
            OracleSequence::Factorial => "factorial",
            OracleSequence::PowerTower => "power_tower",
            OracleSequence::Custom { name, .. } => name,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "n^n" | "nn" => Some(OracleSequence::NN),
            "catalan" => Some(OracleSequence::Catalan),
            "factorial" => Some(OracleSequence::Factorial),
            "power_tower" => Some(OracleSequence::PowerTower),
            _ => None,
        }
    }

    pub fn custom<F>(name: &str, f: F) -> Self
    where
        F: Fn(u64) -> Rat + Send + Sync + 'static,
    {
        OracleSequence::Custom {
            name: name.to_string(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, n: u64) -> Rat {
        match self {
            OracleSequence::NN => {
                if n == 0 {
                    Rat::one()
                } else {
                    Rat::from(BigInt::from(n).pow(u32::try_from(n).expect("n fits u32")))
                }
            }
            OracleSequence::Catalan => Rat::from(catalan_bigint(n)),
            OracleSequence::Factorial => {
                let mut acc = BigInt::one();
                for i in 2..=n {
                    acc *= i;
                }
                Rat::from(acc)
            }
            OracleSequence::PowerTower => {
                let e = 1u64.checked_shl(u32::try_from(n).expect("n fits u32"))
                    .expect("2^n exponent fits u64");
                Rat::from(BigInt::from(2).pow(u32::try_from(e).expect("exponent fits u32")))
            }
            OracleSequence::Custom { f, .. } => f(n),
        }
    }

    /// `u_0 ..= u_{len-1}`, computed incrementally where that is cheaper than
    /// independent evaluations.
    pub fn values(&self, len: u64) -> Vec<Rat> {
        match self {
            OracleSequence::Factorial => {
                let mut out = Vec::with_capacity(len as usize);
                let mut acc = BigInt::one();
                for n in 0..len {
                    if n > 1 {
                        acc *= n;
                    }
                    out.push(Rat::from(acc.clone()));
                }
                out
            }
            OracleSequence::Catalan => {
                let mut out = Vec::with_capacity(len as usize);
                let mut c = BigInt::one();
                for n in 0..len {
                    if n > 0 {
                        // C_n = C_{n-1} * (4n - 2) / (n + 1), exact division
                        c = c * (4 * n - 2) / (n + 1);
                    }
                    out.push(Rat::from(c.clone()));
                }
                out
            }
            OracleSequence::PowerTower => {
                let mut out = Vec::with_capacity(len as usize);
                let mut v = BigInt::from(2);
                for n in 0..len {
                    if n > 0 {
                        v = &v * &v;
                    }
                    out.push(Rat::from(v.clone()));
                }
                out
            }
            _ => (0..len).map(|n| self.eval(n)).collect(),
        }
    }
}

impl SequenceOracle for OracleSequence {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        Ok(self.eval(n))
    }

    fn prefix(&self, len: u64) -> Result<Vec<Rat>, EngineError> {
        Ok(self.values(len))
    }
}

/// Exact `n`th Catalan number via the product form of `C(2n, n) / (n + 1)`.
pub fn catalan_bigint(n: u64) -> BigInt {
    let mut c = BigInt::one();
    for k in 1..=n {
        c = c * (4 * k - 2) / (k + 1);
    }
    c
}
