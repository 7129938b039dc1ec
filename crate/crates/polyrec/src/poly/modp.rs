//! Polynomials with coefficients reduced modulo a prime.

use std::collections::BTreeMap;
use std::fmt;

use super::Monomial;
use crate::modarith::{mulmod, powmod};

/// Sparse polynomial over `F_p`. Built via `MultiPoly::reduce_mod` /
/// `UniPoly::reduce_mod`, which enforce primality and integrality; all stored
/// coefficients lie in `1..p` (zeros dropped).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModPoly {
    modulus: u64,
    varcount: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl ModPoly {
    pub(crate) fn from_parts(modulus: u64, varcount: usize, terms: BTreeMap<Monomial, u64>) -> Self {
        debug_assert!(terms.values().all(|&c| c != 0 && c < modulus));
        ModPoly {
            modulus,
            varcount,
            terms,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn varcount(&self) -> usize {
        self.varcount
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &u64)> {
        self.terms.iter()
    }

    /// Value at a point with coordinates in `0..p`.
    pub fn eval(&self, point: &[u64]) -> u64 {
        assert_eq!(point.len(), self.varcount, "arity mismatch");
        let p = self.modulus;
        let mut acc = 0u64;
        for (m, &c) in &self.terms {
            let mut term = c;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term = mulmod(term, powmod(point[i], e as u64, p), p);
                }
            }
            acc = (acc + term) % p;
        }
        acc
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (mod {})", self.modulus);
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mono: Vec<String> = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("x{i}")
                        } else {
                            format!("x{i}^{e}")
                        }
                    })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else if *c == 1 {
                    mono.join("*")
                } else {
                    format!("{}*{}", c, mono.join("*"))
                }
            })
            .collect();
        write!(f, "{} (mod {})", parts.join(" + "), self.modulus)
    }
}
