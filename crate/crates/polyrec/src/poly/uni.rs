//! Dense univariate polynomials over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{int, ModPoly, Monomial, PolyError, Rat};
use crate::modarith::is_prime_u64;

/// Coefficient vector indexed by power; trailing zeros are trimmed, so the
/// leading coefficient is nonzero unless the polynomial is zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(int(1))
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![int(0), int(1)])
    }

    /// `x + c`.
    pub fn x_plus(c: i64) -> Self {
        Self::from_coeffs(vec![int(c), int(1)])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> Rat {
        self.coeffs.get(power).cloned().unwrap_or_else(|| int(0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![int(0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = int(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Coefficients as integers; errors if any coefficient is fractional.
    pub fn to_int_coeffs(&self) -> Result<Vec<BigInt>, PolyError> {
        self.coeffs
            .iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.numer().clone())
                } else {
                    Err(PolyError::NonIntegerCoefficient(c.to_string()))
                }
            })
            .collect()
    }

    /// Exact integer value at an integer point (integer coefficients only).
    pub fn eval_bigint(&self, x: &BigInt) -> Result<BigInt, PolyError> {
        let coeffs = self.to_int_coeffs()?;
        let mut acc = BigInt::zero();
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        Ok(acc)
    }

    /// Horner evaluation of the reduction mod `p` at `a`.
    pub fn eval_mod(&self, a: u64, p: u64) -> Result<u64, PolyError> {
        let coeffs = self.to_int_coeffs()?;
        let pb = BigInt::from(p);
        let mut acc: u64 = 0;
        for c in coeffs.iter().rev() {
            let r: u64 = (&c.mod_floor(&pb)).try_into().expect("residue fits u64");
            acc = (crate::modarith::mulmod(acc, a % p, p) + r) % p;
        }
        Ok(acc)
    }

    /// Largest absolute value among integer coefficients.
    pub fn max_abs_coeff(&self) -> Result<BigInt, PolyError> {
        Ok(self
            .to_int_coeffs()?
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero))
    }

    /// Coefficient-wise reduction modulo a prime, as a 1-variable `ModPoly`.
    pub fn reduce_mod(&self, modulus: u64) -> Result<ModPoly, PolyError> {
        if !is_prime_u64(modulus) {
            return Err(PolyError::NonPrimeModulus(modulus));
        }
        let coeffs = self.to_int_coeffs()?;
        let pb = BigInt::from(modulus);
        let mut terms = std::collections::BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            let r: u64 = (&c.mod_floor(&pb)).try_into().expect("residue fits u64");
            if r != 0 {
                terms.insert(Monomial::from_exponents(vec![i as u32]), r);
            }
        }
        Ok(ModPoly::from_parts(modulus, 1, terms))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let abs = c.abs();
            if first {
                if negative {
                    f.write_str("-")?;
                }
                first = false;
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let var = match e {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            };
            if var.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{abs}*{var}")?;
            }
        }
        Ok(())
    }
}
