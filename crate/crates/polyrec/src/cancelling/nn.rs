//! Refutation machinery for candidate cancelling polynomials of `n^n`.
//!
//! A window polynomial `Z(x_0..x_k)` applied to `(n^n, ..., (n+k)^(n+k))`
//! rewrites, monomial by monomial, into `sum_i P_i(n)^n * Q_i(n)` with
//! univariate integer `P_i, Q_i`: the base exponent `n` splits off and the
//! offset parts land in `Q_i`. Working modulo a prime decouples base and
//! exponent (choose `n = a mod p`, `n = b mod p-1`), so a cancelling `Z`
//! would force `sum_i P_i(a)^b Q_i(a) = 0 mod p` for *every* residue pair.
//! Stacking the exponents `b = 1..m` gives a scaled Vandermonde system whose
//! determinant is the product `S = prod P_i * prod_{i<j} (P_i - P_j)`; for a
//! prime beyond all coefficients and degrees this collapses to a nonzero
//! polynomial with too many roots. Any nonzero scan entry therefore refutes
//! `Z` concretely.

use num_bigint::BigInt;
use num_traits::Zero;

use super::CancelError;
use crate::modarith::{is_prime_u64, mulmod, next_prime_at_least, powmod};
use crate::poly::{MultiPoly, UniPoly};

/// Pairs `(P_i, Q_i)` with `Z(n^n, ..., (n+k)^(n+k)) = sum P_i(n)^n Q_i(n)`,
/// plus the product polynomial governing the Vandermonde determinant.
///
/// Produced by `nn_decompose`, which guarantees all `P_i`, `Q_i` nonzero,
/// the `P_i` pairwise distinct and `S` nonzero. The `from_pairs` constructor
/// skips those guarantees and exists for assembling artificial sums in
/// analyses and tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NNDecomposition {
    pairs: Vec<(UniPoly, UniPoly)>,
    s_poly: UniPoly,
}

impl NNDecomposition {
    pub fn from_pairs(pairs: Vec<(UniPoly, UniPoly)>) -> Self {
        let s_poly = s_from_pairs(&pairs);
        NNDecomposition { pairs, s_poly }
    }

    pub fn pairs(&self) -> &[(UniPoly, UniPoly)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn s_poly(&self) -> &UniPoly {
        &self.s_poly
    }

    /// Exact value of `sum_i P_i(n)^n Q_i(n)`.
    pub fn window_sum(&self, n: u64) -> Result<BigInt, CancelError> {
        let nb = BigInt::from(n);
        let mut acc = BigInt::zero();
        for (p, q) in &self.pairs {
            let base = p.eval_bigint(&nb)?;
            let exp = u32::try_from(n).expect("index fits u32");
            acc += base.pow(exp) * q.eval_bigint(&nb)?;
        }
        Ok(acc)
    }
}

fn s_from_pairs(pairs: &[(UniPoly, UniPoly)]) -> UniPoly {
    let mut s = UniPoly::one();
    for (p, _) in pairs {
        s = s.mul(p);
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            s = s.mul(&pairs[i].0.sub(&pairs[j].0));
        }
    }
    s
}

/// Decompose a nonzero integer window polynomial against the `n^n` window.
/// Monomial `c * prod_j x_j^(d_j)` contributes
/// `P(x) = prod_j (x + j)^(d_j)` and `Q(x) = c * prod_j (x + j)^(j * d_j)`.
pub fn nn_decompose(z: &MultiPoly) -> Result<NNDecomposition, CancelError> {
    if z.is_zero() {
        return Err(CancelError::ZeroPolynomial);
    }
    let mut pairs = Vec::with_capacity(z.term_count());
    for (m, c) in z.terms() {
        if !c.is_integer() {
            return Err(CancelError::Poly(
                crate::poly::PolyError::NonIntegerCoefficient(c.to_string()),
            ));
        }
        let mut p = UniPoly::one();
        let mut q = UniPoly::constant(c.clone());
        for (j, &d) in m.exponents().iter().enumerate() {
            if d == 0 {
                continue;
            }
            let shift = UniPoly::x_plus(j as i64);
            p = p.mul(&shift.pow(d));
            q = q.mul(&shift.pow(d * j as u32));
        }
        pairs.push((p, q));
    }
    // Distinct monomials have distinct exponent vectors, hence distinct root
    // multisets for the P_i.
    debug_assert!({
        let mut ok = true;
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                ok &= pairs[i].0 != pairs[j].0;
            }
        }
        ok
    });
    Ok(NNDecomposition::from_pairs(pairs))
}

/// Exact determinant of the stacked-exponent matrix `[P_j(a)^i]` for
/// `i = 1..m`, together with the signed product `(-1)^(m(m-1)/2) S(a)`.
/// The two agree for every decomposition; the sign accounts for taking the
/// pairwise differences in ascending index order inside `S`.
pub fn vandermonde_parts(
    dec: &NNDecomposition,
    a: &BigInt,
) -> Result<(BigInt, BigInt), CancelError> {
    let m = dec.len();
    let values: Vec<BigInt> = dec
        .pairs
        .iter()
        .map(|(p, _)| p.eval_bigint(a))
        .collect::<Result<_, _>>()?;
    let matrix: Vec<Vec<BigInt>> = (1..=m)
        .map(|i| {
            values
                .iter()
                .map(|v| v.pow(u32::try_from(i).expect("row index fits u32")))
                .collect()
        })
        .collect();
    let det = crate::linalg::det_bigint(matrix);
    let s_val = dec.s_poly.eval_bigint(a)?;
    let signed = if (m * (m - 1) / 2) % 2 == 1 {
        -s_val
    } else {
        s_val
    };
    Ok((det, signed))
}

pub fn vandermonde_check(dec: &NNDecomposition, a: &BigInt) -> Result<bool, CancelError> {
    let (det, signed) = vandermonde_parts(dec, a)?;
    Ok(det == signed)
}

/// A residue pair where the decomposed sum fails to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub a: u64,
    pub b: u64,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceScan {
    pub p: u64,
    pub violations: Vec<Violation>,
    pub pairs_scanned: u64,
    /// Whether the whole `(a, b)` grid was examined. Limited scans stop
    /// early once enough violations are collected.
    pub exhaustive: bool,
}

/// `sum_i P_i(a)^b Q_i(a) mod p` for one residue pair.
pub fn congruence_entry(
    dec: &NNDecomposition,
    a: u64,
    b: u64,
    p: u64,
) -> Result<u64, CancelError> {
    let mut acc = 0u64;
    for (pp, qq) in &dec.pairs {
        let base = pp.eval_mod(a, p)?;
        let term = mulmod(powmod(base, b, p), qq.eval_mod(a, p)?, p);
        acc = (acc + term) % p;
    }
    Ok(acc)
}

/// `sum_i P_i(n)^n Q_i(n) mod p`; used to cross-check scan entries against
/// their witness indices.
pub fn window_sum_mod(dec: &NNDecomposition, n: u64, p: u64) -> Result<u64, CancelError> {
    let mut acc = 0u64;
    for (pp, qq) in &dec.pairs {
        let base = pp.eval_mod(n % p, p)?;
        let term = mulmod(powmod(base, n, p), qq.eval_mod(n % p, p)?, p);
        acc = (acc + term) % p;
    }
    Ok(acc)
}

/// Smallest index `n >= 1` with `n = a mod p` and `n = b mod p-1`. Such an
/// index evaluates the genuine window sum to the `(a, b)` scan entry mod `p`.
pub fn crt_witness(p: u64, a: u64, b: u64) -> u64 {
    // p = 1 mod (p-1), so n = a + p*t needs t = b - a mod (p-1)
    let m = p - 1;
    let t = (b % m + m - a % m) % m;
    let n = a % p + p * t;
    if n == 0 {
        p * m
    } else {
        n
    }
}

fn scan(
    dec: &NNDecomposition,
    p: u64,
    max_violations: Option<usize>,
) -> Result<CongruenceScan, CancelError> {
    if !is_prime_u64(p) {
        return Err(CancelError::NonPrimeModulus(p));
    }
    // Residues of every coefficient up front would be cheaper, but the grid
    // cost dominates only for large p, where the early stop kicks in first.
    let mut violations = Vec::new();
    let mut pairs_scanned = 0u64;
    for a in 0..p {
        for b in 1..p {
            pairs_scanned += 1;
            let value = congruence_entry(dec, a, b, p)?;
            if value != 0 {
                violations.push(Violation { a, b, value });
                if max_violations.is_some_and(|cap| violations.len() >= cap) {
                    return Ok(CongruenceScan {
                        p,
                        violations,
                        pairs_scanned,
                        exhaustive: false,
                    });
                }
            }
        }
    }
    Ok(CongruenceScan {
        p,
        violations,
        pairs_scanned,
        exhaustive: true,
    })
}

/// Exhaustive sweep of all `(a, b)` with `a in 0..p`, `b in 1..p`. If the
/// polynomial behind `dec` cancelled `n^n`, every entry would be zero.
pub fn crt_congruence_scan(dec: &NNDecomposition, p: u64) -> Result<CongruenceScan, CancelError> {
    scan(dec, p, None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationReport {
    /// Smallest prime exceeding every coefficient of `S` and the `Q_i` and
    /// exceeding `deg S + max deg Q_i`.
    pub p: u64,
    pub scan: CongruenceScan,
    pub refuted: bool,
}

/// Refute a candidate cancelling polynomial for `n^n` by exhibiting nonzero
/// congruence entries at a deterministically chosen prime. At such a prime a
/// genuine cancelling polynomial cannot exist, so a clean scan (no
/// violations over the full grid) is flagged rather than trusted.
pub fn refute_nn_candidate(z: &MultiPoly) -> Result<RefutationReport, CancelError> {
    let dec = nn_decompose(z)?;
    let mut bound = dec.s_poly.max_abs_coeff()?;
    let mut max_qdeg = 0usize;
    for (_, q) in dec.pairs() {
        bound = bound.max(q.max_abs_coeff()?);
        max_qdeg = max_qdeg.max(q.degree().unwrap_or(0));
    }
    let degsum = dec.s_poly.degree().unwrap_or(0) + max_qdeg;
    bound = bound.max(BigInt::from(degsum)) + 1;
    let start = u64::try_from(&bound)
        .map_err(|_| CancelError::PrimeTooLarge(bound.to_string()))?;
    let p = next_prime_at_least(start)
        .ok_or_else(|| CancelError::PrimeTooLarge(bound.to_string()))?;

    let scan = scan(&dec, p, Some(16))?;
    let refuted = !scan.violations.is_empty();
    Ok(RefutationReport { p, scan, refuted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat, MultiPoly};

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    /// x0*x2 - x1^2 in three window variables.
    fn z_two_terms() -> MultiPoly {
        x(3, 0).mul(&x(3, 2)).sub(&x(3, 1).pow(2))
    }

    #[test]
    fn decompose_two_term_example() {
        let dec = nn_decompose(&z_two_terms()).unwrap();
        assert_eq!(dec.len(), 2);
        // term x1^2 (grlex-smaller): P = (x+1)^2, Q = -(x+1)^2
        let xp1sq = UniPoly::x_plus(1).pow(2);
        assert_eq!(dec.pairs()[0].0, xp1sq);
        assert_eq!(dec.pairs()[0].1, xp1sq.neg());
        // term x0*x2: P = x(x+2), Q = (x+2)^2
        let p1 = UniPoly::x().mul(&UniPoly::x_plus(2));
        assert_eq!(dec.pairs()[1].0, p1);
        assert_eq!(dec.pairs()[1].1, UniPoly::x_plus(2).pow(2));
        assert_ne!(dec.pairs()[0].0, dec.pairs()[1].0);
    }

    #[test]
    fn decompose_single_variable() {
        let dec = nn_decompose(&x(1, 0)).unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!(dec.pairs()[0].0, UniPoly::x());
        assert_eq!(dec.pairs()[0].1, UniPoly::one());
        assert_eq!(dec.s_poly(), &UniPoly::x());
    }

    #[test]
    fn decompose_constant() {
        let dec = nn_decompose(&MultiPoly::constant(2, int(7))).unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!(dec.pairs()[0].0, UniPoly::one());
        assert_eq!(dec.pairs()[0].1, UniPoly::constant(int(7)));
        assert_eq!(dec.s_poly(), &UniPoly::one());
    }

    #[test]
    fn decompose_rejects_bad_input() {
        assert!(matches!(
            nn_decompose(&MultiPoly::zero(2)),
            Err(CancelError::ZeroPolynomial)
        ));
        assert!(nn_decompose(&x(1, 0).scale(&rat(1, 2))).is_err());
    }

    #[test]
    fn decomposition_identity_small() {
        // Z(n^n, (n+1)^(n+1), (n+2)^(n+2)) = sum P_i(n)^n Q_i(n)
        let z = z_two_terms();
        let dec = nn_decompose(&z).unwrap();
        let nn = crate::engines::OracleSequence::NN;
        for n in 0..=12u64 {
            let window: Vec<_> = (0..3).map(|j| nn.eval(n + j)).collect();
            let direct = z.evaluate(&window).unwrap();
            assert_eq!(direct, crate::poly::Rat::from(dec.window_sum(n).unwrap()));
        }
    }

    #[test]
    fn vandermonde_two_by_two() {
        let dec = nn_decompose(&z_two_terms()).unwrap();
        // at a = 2: P values {9, 8}; det [[9,8],[81,64]] = -72, S(2) = 72
        // with the pair order (x+1)^2, x(x+2)
        let (det, signed) = vandermonde_parts(&dec, &BigInt::from(2)).unwrap();
        assert_eq!(det, signed);
        assert_eq!(det.magnitude(), &72u32.into());
        assert!(vandermonde_check(&dec, &BigInt::from(5)).unwrap());
    }

    #[test]
    fn vandermonde_single_pair() {
        let dec = nn_decompose(&x(1, 0).scale(&int(3))).unwrap();
        for a in 0..6 {
            let (det, signed) = vandermonde_parts(&dec, &BigInt::from(a)).unwrap();
            assert_eq!(det, signed);
            assert_eq!(det, BigInt::from(a));
        }
    }

    #[test]
    fn crt_witness_examples() {
        assert_eq!(crt_witness(7, 3, 5), 17);
        assert_eq!(crt_witness(5, 0, 4), 20); // 20 = 0 mod 5, 0 = 4 mod 4
        let n = crt_witness(5, 0, 4);
        assert_eq!(n % 5, 0);
        assert_eq!(n % 4, 0);
        // the all-zero pair maps to the first strictly positive solution
        assert_eq!(crt_witness(3, 0, 2), 6);
        assert!(crt_witness(7, 0, 6) > 0);
    }

    #[test]
    fn scan_finds_violations_for_non_cancelling_z() {
        let dec = nn_decompose(&z_two_terms()).unwrap();
        let scan = crt_congruence_scan(&dec, 5).unwrap();
        assert!(scan.exhaustive);
        assert!(!scan.violations.is_empty());
        // each reported entry matches the genuine window sum at its witness
        for v in &scan.violations {
            let n = crt_witness(5, v.a, v.b);
            assert_eq!(window_sum_mod(&dec, n, 5).unwrap(), v.value);
        }
    }

    #[test]
    fn formally_zero_sum_scans_clean() {
        // pairs (P, Q) and (P, -Q) cancel identically
        let p = UniPoly::x_plus(1).pow(2);
        let q = UniPoly::x_plus(2);
        let dec =
            NNDecomposition::from_pairs(vec![(p.clone(), q.clone()), (p, q.neg())]);
        let scan = crt_congruence_scan(&dec, 7).unwrap();
        assert!(scan.exhaustive);
        assert!(scan.violations.is_empty());
    }

    #[test]
    fn refute_known_candidates() {
        // the window polynomial that cancels n! does not cancel n^n
        let z = x(3, 0)
            .mul(&x(3, 2))
            .sub(&x(3, 1).pow(2))
            .sub(&x(3, 0).mul(&x(3, 1)));
        let report = refute_nn_candidate(&z).unwrap();
        assert!(report.refuted);
        // and the n = 0 window already witnesses it outside the scan:
        // (1, 1, 4) gives 4 - 1 - 1 = 2
        let nn = crate::engines::OracleSequence::NN;
        let window: Vec<_> = (0..3).map(|j| nn.eval(j)).collect();
        assert_eq!(z.evaluate(&window).unwrap(), int(2));

        let trivial = refute_nn_candidate(&x(1, 0)).unwrap();
        assert!(trivial.refuted);
    }

    #[test]
    fn refute_prime_selection() {
        // Z = x0: S = x, Q = 1; bound max(1, 1) + 1 = 2, p = 2
        let report = refute_nn_candidate(&x(1, 0)).unwrap();
        assert_eq!(report.p, 2);
        // Z = 7: S = 1, Q = 7, degsum 0; smallest prime > 7 is 11
        let report = refute_nn_candidate(&MultiPoly::constant(1, int(7))).unwrap();
        assert_eq!(report.p, 11);
        assert!(report.refuted);
    }
}
