//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{int, ModPoly, Monomial, PolyError, Rat};
use crate::modarith::is_prime_u64;

/// Multivariate polynomial. Invariants: no stored zero coefficients, every
/// monomial has exactly `varcount` exponents, terms are kept in
/// graded-lexicographic order. Two polynomials are equal iff their term maps
/// are equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    varcount: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl MultiPoly {
    pub fn zero(varcount: usize) -> Self {
        MultiPoly {
            varcount,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(varcount: usize, c: Rat) -> Self {
        let mut p = Self::zero(varcount);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(varcount), c);
        }
        p
    }

    pub fn one(varcount: usize) -> Self {
        Self::constant(varcount, int(1))
    }

    /// The variable `x_index`.
    pub fn var(varcount: usize, index: usize) -> Self {
        let mut p = Self::zero(varcount);
        p.terms.insert(Monomial::var(varcount, index), int(1));
        p
    }

    /// Build from (monomial, coefficient) pairs; merges duplicates and drops
    /// zero coefficients.
    pub fn from_terms<I>(varcount: usize, iter: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rat)>,
    {
        let mut p = Self::zero(varcount);
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        assert_eq!(m.varcount(), self.varcount, "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
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

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(|| int(0))
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::unit(self.varcount))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Leading term in graded-lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.varcount, rhs.varcount, "varcount mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            varcount: self.varcount,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero(self.varcount);
        }
        MultiPoly {
            varcount: self.varcount,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.try_mul_bounded(rhs, usize::MAX)
    }

    /// Product, refusing to materialize more than `max_terms` monomials.
    pub fn try_mul_bounded(&self, rhs: &Self, max_terms: usize) -> Result<Self, PolyError> {
        if self.varcount != rhs.varcount {
            return Err(PolyError::VarcountMismatch(self.varcount, rhs.varcount));
        }
        if self
            .terms
            .len()
            .saturating_mul(rhs.terms.len())
            > max_terms.saturating_mul(4)
        {
            return Err(PolyError::TermBudgetExceeded { max_terms });
        }
        let mut out = Self::zero(self.varcount);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.checked_mul(mb).ok_or(PolyError::DegreeOverflow)?;
                out.add_term(m, ca * cb);
            }
        }
        if out.terms.len() > max_terms {
            return Err(PolyError::TermBudgetExceeded { max_terms });
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("polynomial product overflow")
    }

    pub fn try_pow_bounded(&self, e: u32, max_terms: usize) -> Result<Self, PolyError> {
        let mut acc = Self::one(self.varcount);
        for _ in 0..e {
            acc = acc.try_mul_bounded(self, max_terms)?;
        }
        Ok(acc)
    }

    pub fn try_pow(&self, e: u32) -> Result<Self, PolyError> {
        self.try_pow_bounded(e, usize::MAX)
    }

    pub fn pow(&self, e: u32) -> Self {
        self.try_pow(e).expect("polynomial power overflow")
    }

    /// Substitute `inners[i]` for variable `i`. The result lives in the
    /// inners' variable set and commutes with evaluation:
    /// `compose(f, g).evaluate(v) = f.evaluate([g_i.evaluate(v)])`.
    pub fn compose(&self, inners: &[MultiPoly]) -> Result<Self, PolyError> {
        self.compose_bounded(inners, usize::MAX)
    }

    /// `compose` with a ceiling on intermediate monomial counts.
    pub fn compose_bounded(
        &self,
        inners: &[MultiPoly],
        max_terms: usize,
    ) -> Result<Self, PolyError> {
        if inners.len() != self.varcount {
            return Err(PolyError::ArityMismatch {
                expected: self.varcount,
                got: inners.len(),
            });
        }
        let inner_vars = match inners.first() {
            Some(p) => p.varcount,
            // A constant in zero variables composes into zero variables.
            None => 0,
        };
        for p in inners {
            if p.varcount != inner_vars {
                return Err(PolyError::VarcountMismatch(inner_vars, p.varcount));
            }
        }

        // Cache successive powers of each inner polynomial.
        let mut powers: Vec<Vec<MultiPoly>> = inners
            .iter()
            .map(|p| vec![MultiPoly::one(inner_vars), p.clone()])
            .collect();
        let power = |i: usize, e: u32, powers: &mut Vec<Vec<MultiPoly>>| -> Result<MultiPoly, PolyError> {
            while powers[i].len() <= e as usize {
                let next = powers[i]
                    .last()
                    .unwrap()
                    .try_mul_bounded(&inners[i], max_terms)?;
                powers[i].push(next);
            }
            Ok(powers[i][e as usize].clone())
        };

        let mut out = Self::zero(inner_vars);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(inner_vars, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    let pe = power(i, e, &mut powers)?;
                    term = term.try_mul_bounded(&pe, max_terms)?;
                }
            }
            out = out.add(&term);
            if out.terms.len() > max_terms {
                return Err(PolyError::TermBudgetExceeded { max_terms });
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat, PolyError> {
        if point.len() != self.varcount {
            return Err(PolyError::ArityMismatch {
                expected: self.varcount,
                got: point.len(),
            });
        }
        // Cache powers of each coordinate up to the maximal exponent used.
        let mut powers: Vec<Vec<Rat>> = point.iter().map(|v| vec![int(1), v.clone()]).collect();
        let mut acc = int(0);
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &point[i];
                    powers[i].push(next);
                }
                term *= &powers[i][e as usize];
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Smallest positive integer `s` such that `s * self` has integer
    /// coefficients, together with that scaled polynomial.
    pub fn clear_denominators(&self) -> Result<(BigInt, MultiPoly), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut scalar = BigInt::one();
        for c in self.terms.values() {
            scalar = scalar.lcm(c.denom());
        }
        let scaled = self.scale(&Rat::from(scalar.clone()));
        debug_assert!(scaled.has_integer_coeffs());
        Ok((scalar, scaled))
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Coefficient-wise reduction modulo a prime; requires integer
    /// coefficients.
    pub fn reduce_mod(&self, modulus: u64) -> Result<ModPoly, PolyError> {
        if !is_prime_u64(modulus) {
            return Err(PolyError::NonPrimeModulus(modulus));
        }
        let mut terms = BTreeMap::new();
        let p = BigInt::from(modulus);
        for (m, c) in &self.terms {
            if !c.is_integer() {
                return Err(PolyError::NonIntegerCoefficient(c.to_string()));
            }
            let r = c.numer().mod_floor(&p);
            let r: u64 = (&r).try_into().expect("residue fits u64");
            if r != 0 {
                terms.insert(m.clone(), r);
            }
        }
        Ok(ModPoly::from_parts(modulus, self.varcount, terms))
    }

    /// Embed into a larger variable set; new variables get exponent zero.
    pub fn pad_vars(&self, varcount: usize) -> Self {
        assert!(varcount >= self.varcount);
        MultiPoly {
            varcount,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.pad(varcount), c.clone()))
                .collect(),
        }
    }

    /// Coefficient of the degree-1 monomial in variable `i`.
    pub fn linear_coefficient(&self, i: usize) -> Rat {
        self.coeff(&Monomial::var(self.varcount, i))
    }

    /// Degree at most 1 (allows a constant term).
    pub fn is_affine(&self) -> bool {
        self.total_degree().is_none_or(|d| d <= 1)
    }

    /// Degree at most 1 and no constant term.
    pub fn is_linear(&self) -> bool {
        self.is_affine() && self.constant_term().is_zero()
    }

    /// True iff `self = c * other` for some nonzero rational `c`.
    pub fn is_scalar_multiple_of(&self, other: &Self) -> bool {
        if self.varcount != other.varcount || self.terms.len() != other.terms.len() {
            return false;
        }
        if self.is_zero() {
            return other.is_zero();
        }
        let (m0, c0) = self.leading().unwrap();
        let c1 = other.coeff(m0);
        if c1.is_zero() {
            return false;
        }
        let ratio = c0 / &c1;
        self.terms
            .iter()
            .all(|(m, c)| *c == other.coeff(m) * &ratio)
    }

    /// Canonical text with caller-chosen variable names.
    pub fn render(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.varcount, "need one name per variable");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mono = render_monomial(m, names);
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{abs}*{mono}"));
            }
        }
        out
    }
}

fn render_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

/// Default variable names `x0, x1, ...`.
pub(crate) fn default_names(varcount: usize) -> Vec<String> {
    (0..varcount).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_names(self.varcount)))
    }
}
