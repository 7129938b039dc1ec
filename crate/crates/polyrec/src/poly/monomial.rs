//! Monomials as exponent vectors with a fixed graded-lexicographic order.

use std::cmp::Ordering;

/// Exponent vector; entry `i` is the power of variable `i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    /// The empty product (all exponents zero).
    pub fn unit(varcount: usize) -> Self {
        Monomial(vec![0; varcount])
    }

    /// A single variable to the first power.
    pub fn var(varcount: usize, index: usize) -> Self {
        assert!(index < varcount, "variable index {index} out of range {varcount}");
        let mut exps = vec![0; varcount];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn varcount(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Product of monomials; `None` on exponent overflow.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_add(b))
            .collect::<Option<Vec<u32>>>()
            .map(Monomial)
    }

    /// Power of a monomial; `None` on exponent overflow.
    pub fn checked_pow(&self, e: u32) -> Option<Self> {
        self.0
            .iter()
            .map(|&a| a.checked_mul(e))
            .collect::<Option<Vec<u32>>>()
            .map(Monomial)
    }

    /// Embed into a larger variable set, padding high indices with zeros.
    pub fn pad(&self, varcount: usize) -> Self {
        assert!(varcount >= self.0.len());
        let mut exps = self.0.clone();
        exps.resize(varcount, 0);
        Monomial(exps)
    }
}

impl Ord for Monomial {
    /// Graded-lexicographic: compare total degree first, then exponents
    /// lexicographically. This order is the canonical term order everywhere
    /// (printing, hashing into linear-system columns, certificate
    /// normalization).
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials in `varcount` variables of total degree at most `max_degree`,
/// in ascending graded-lexicographic order.
pub fn monomials_up_to_degree(varcount: usize, max_degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; varcount];
    fn rec(out: &mut Vec<Monomial>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
        if pos == current.len() {
            out.push(Monomial::from_exponents(current.clone()));
            return;
        }
        for e in 0..=remaining {
            current[pos] = e;
            rec(out, current, pos + 1, remaining - e);
        }
        current[pos] = 0;
    }
    if varcount == 0 {
        out.push(Monomial::unit(0));
    } else {
        rec(&mut out, &mut current, 0, max_degree);
    }
    out.sort();
    out
}
