//! Window polynomials: iterated step rules, search for polynomials that
//! vanish on every window of consecutive sequence values, exact and
//! empirical verification, and the restricted single-recurrence search.
//!
//! Two search modes with different guarantees:
//!
//! - the *symbolic* search composes candidate polynomials with the iterated
//!   step rules and demands the result be identically zero; a hit is an
//!   exact proof that the polynomial cancels every window.
//! - the *empirical* search imposes the necessary linear conditions
//!   `Q(u_n, ..., u_{n+k}) = 0` sampled at the first N indices and computes
//!   the exact nullspace. A nonempty basis is only a candidate list
//!   (re-verified on a doubled prefix); an empty basis is a rigorous
//!   certificate that *no* polynomial of the given window and degree
//!   cancels the sequence, because the sampled conditions are necessary.

mod nn;

pub use nn::{
    congruence_entry, crt_congruence_scan, crt_witness, nn_decompose, refute_nn_candidate,
    vandermonde_check, vandermonde_parts, window_sum_mod, CongruenceScan, NNDecomposition,
    RefutationReport, Violation,
};

use num_traits::Zero;
use thiserror::Error;

use crate::engines::{EngineError, PolySystem, SequenceOracle};
use crate::linalg::nullspace_basis;
use crate::poly::{monomials_up_to_degree, Monomial, MultiPoly, PolyError, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CancelError {
    #[error("a cancelling polynomial must be nonzero")]
    ZeroPolynomial,
    #[error("term budget exceeded: composition would need more than {max_terms} monomials")]
    BudgetExceeded { max_terms: usize },
    #[error("need at least {needed} samples for {unknowns} unknowns, got {got}")]
    InsufficientSamples { needed: u64, unknowns: u64, got: u64 },
    #[error("required prime does not fit in 64 bits ({0})")]
    PrimeTooLarge(String),
    #[error("{0} is not prime")]
    NonPrimeModulus(u64),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl CancelError {
    pub fn name(&self) -> &'static str {
        match self {
            CancelError::ZeroPolynomial => "ZeroPolynomial",
            CancelError::BudgetExceeded { .. } => "BudgetExceeded",
            CancelError::InsufficientSamples { .. } => "InsufficientSamples",
            CancelError::PrimeTooLarge(_) => "PrimeTooLarge",
            CancelError::NonPrimeModulus(_) => "NonPrimeModulus",
            CancelError::Poly(e) => e.name(),
            CancelError::Engine(e) => e.name(),
        }
    }
}

/// Ceiling on intermediate monomial counts during composition. Iterated
/// rules grow degree exponentially; the searches refuse loudly instead of
/// filling memory.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_terms: 1_000_000 }
    }
}

fn budgeted(e: PolyError, budget: &Budget) -> CancelError {
    match e {
        PolyError::TermBudgetExceeded { .. } => CancelError::BudgetExceeded {
            max_terms: budget.max_terms,
        },
        other => CancelError::Poly(other),
    }
}

/// Table of iterated step polynomials: entry `(t, i)` maps a state to the
/// value of sequence `i` after `t` more steps. Level 0 is the identity
/// substitution and level `t` composes the rules with level `t - 1`.
#[derive(Debug, Clone)]
pub struct IteratedRules {
    output: usize,
    table: Vec<Vec<MultiPoly>>,
}

impl IteratedRules {
    pub fn depth(&self) -> usize {
        self.table.len() - 1
    }

    pub fn get(&self, t: usize, i: usize) -> &MultiPoly {
        &self.table[t][i]
    }

    /// The iterates of the output sequence: level `t` evaluated on the state
    /// at `n` gives the output at `n + t`.
    pub fn output_iterates(&self) -> Vec<&MultiPoly> {
        self.table.iter().map(|level| &level[self.output]).collect()
    }
}

pub fn iterate_rules(
    s: &PolySystem,
    depth: usize,
    budget: &Budget,
) -> Result<IteratedRules, CancelError> {
    let k = s.dim();
    let mut table = Vec::with_capacity(depth + 1);
    table.push((0..k).map(|i| MultiPoly::var(k, i)).collect::<Vec<_>>());
    for _ in 0..depth {
        let prev = table.last().expect("at least the identity level");
        let next: Vec<MultiPoly> = s
            .rules()
            .iter()
            .map(|rule| {
                rule.compose_bounded(prev, budget.max_terms)
                    .map_err(|e| budgeted(e, budget))
            })
            .collect::<Result<_, _>>()?;
        table.push(next);
    }
    Ok(IteratedRules {
        output: s.output_index(),
        table,
    })
}

/// How a cancelling certificate was established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertMode {
    /// The composition with the iterated rules is identically zero: an exact
    /// proof for every index.
    Symbolic,
    /// Window conditions checked for `n < samples` only.
    Empirical { samples: u64 },
}

/// A nonzero polynomial in `w + 1` variables vanishing on windows
/// `(u_n, ..., u_{n+w})`, with the strength of the claim in `mode`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancellingCertificate {
    pub poly: MultiPoly,
    pub mode: CertMode,
}

impl CancellingCertificate {
    /// Number of consecutive values a window spans.
    pub fn window_len(&self) -> usize {
        self.poly.varcount()
    }
}

/// Outcome of the symbolic search.
#[derive(Debug, Clone)]
pub struct SymbolicSearch {
    pub degree_bound: u32,
    /// Exact nullspace basis of the composition-coefficient system, i.e. all
    /// cancelling polynomials of the bounded degree up to linear combination.
    /// Empty means none exists within this degree bound (larger degrees may
    /// still work).
    pub basis: Vec<MultiPoly>,
    pub certificates: Vec<CancellingCertificate>,
}

/// Search for a polynomial `Q` of degree at most `degree_bound` in the
/// window variables `x_0..x_k` (`k` = system dimension) such that composing
/// `Q` with the iterated output rules is identically zero. The unknown
/// coefficients of `Q` enter linearly, so the search is an exact nullspace
/// computation over the monomial coefficients of the composition.
pub fn find_cancelling_symbolic(
    s: &PolySystem,
    degree_bound: u32,
    budget: &Budget,
) -> Result<SymbolicSearch, CancelError> {
    let k = s.dim();
    let iters = iterate_rules(s, k, budget)?;
    let gs = iters.output_iterates();
    let monos = monomials_up_to_degree(k + 1, degree_bound);

    // Powers of each iterate, computed on demand up to the degree bound.
    let mut powers: Vec<Vec<MultiPoly>> = gs
        .iter()
        .map(|g| vec![MultiPoly::one(k), (*g).clone()])
        .collect();
    let mut composed = Vec::with_capacity(monos.len());
    for m in &monos {
        let mut acc = MultiPoly::one(k);
        for (i, &e) in m.exponents().iter().enumerate() {
            while powers[i].len() <= e as usize {
                let next = powers[i]
                    .last()
                    .expect("powers start nonempty")
                    .try_mul_bounded(gs[i], budget.max_terms)
                    .map_err(|e| budgeted(e, budget))?;
                powers[i].push(next);
            }
            if e > 0 {
                acc = acc
                    .try_mul_bounded(&powers[i][e as usize], budget.max_terms)
                    .map_err(|e| budgeted(e, budget))?;
            }
        }
        composed.push(acc);
    }

    // Row per state monomial appearing anywhere, column per candidate
    // monomial of Q.
    let support: Vec<Monomial> = {
        let mut set = std::collections::BTreeSet::new();
        for c in &composed {
            for (m, _) in c.terms() {
                set.insert(m.clone());
            }
        }
        set.into_iter().collect()
    };
    let rows: Vec<Vec<Rat>> = support
        .iter()
        .map(|sm| composed.iter().map(|c| c.coeff(sm)).collect())
        .collect();
    let basis_vecs = nullspace_basis(&rows, monos.len());
    let basis: Vec<MultiPoly> = basis_vecs
        .iter()
        .map(|v| MultiPoly::from_terms(k + 1, monos.iter().cloned().zip(v.iter().cloned())))
        .collect();
    let certificates = basis
        .iter()
        .map(|q| CancellingCertificate {
            poly: q.clone(),
            mode: CertMode::Symbolic,
        })
        .collect();
    Ok(SymbolicSearch {
        degree_bound,
        basis,
        certificates,
    })
}

/// Outcome of exact verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicVerdict {
    Cancelling,
    /// The composed polynomial that should have vanished.
    NotCancelling { residual: MultiPoly },
}

/// Exact check that `q` composed with the iterated output rules is
/// identically zero. `q` lives in window variables `x_0..x_w` for any
/// window width `w`; width need not match the system dimension.
pub fn verify_symbolic(
    s: &PolySystem,
    q: &MultiPoly,
    budget: &Budget,
) -> Result<SymbolicVerdict, CancelError> {
    if q.is_zero() {
        return Err(CancelError::ZeroPolynomial);
    }
    let depth = q.varcount().saturating_sub(1);
    let iters = iterate_rules(s, depth, budget)?;
    let gs: Vec<MultiPoly> = iters.output_iterates().into_iter().cloned().collect();
    let composed = q
        .compose_bounded(&gs, budget.max_terms)
        .map_err(|e| budgeted(e, budget))?;
    if composed.is_zero() {
        Ok(SymbolicVerdict::Cancelling)
    } else {
        Ok(SymbolicVerdict::NotCancelling { residual: composed })
    }
}

/// Outcome of sampled verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmpiricalVerdict {
    Pass,
    Counterexample { n: u64, value: Rat },
}

/// Evaluate the window condition `q(u_n, ..., u_{n+w}) = 0` for
/// `n < samples`; returns the first violation.
pub fn verify_empirical<S: SequenceOracle + ?Sized>(
    o: &S,
    q: &MultiPoly,
    samples: u64,
) -> Result<EmpiricalVerdict, CancelError> {
    if q.is_zero() {
        return Err(CancelError::ZeroPolynomial);
    }
    let w = q.varcount().saturating_sub(1) as u64;
    let prefix = o.prefix(samples + w)?;
    for n in 0..samples as usize {
        let value = q.evaluate(&prefix[n..n + q.varcount()])?;
        if !value.is_zero() {
            return Ok(EmpiricalVerdict::Counterexample {
                n: n as u64,
                value,
            });
        }
    }
    Ok(EmpiricalVerdict::Pass)
}

/// Outcome of the sampled nullspace search.
#[derive(Debug, Clone)]
pub struct EmpiricalSearch {
    pub window: usize,
    pub degree_bound: u32,
    pub samples: u64,
    /// Exact nullspace of the sampled window conditions. Emptiness is
    /// conclusive: the conditions are necessary, so no polynomial of this
    /// window and degree cancels the sequence.
    pub nullspace: Vec<MultiPoly>,
    /// Basis elements that additionally survived re-verification on a
    /// doubled prefix.
    pub certificates: Vec<CancellingCertificate>,
}

impl EmpiricalSearch {
    /// True when the emptiness certificate applies.
    pub fn conclusively_empty(&self) -> bool {
        self.nullspace.is_empty()
    }
}

fn required_samples(unknowns: u64) -> u64 {
    // 25% headroom over the unknown count guards against rank-deficient
    // sample matrices producing spurious candidates.
    unknowns + unknowns.div_ceil(4)
}

/// Impose `Q(u_n, ..., u_{n+k}) = 0` for `n = 0..samples-1` on all monomials
/// of degree at most `degree_bound` in `k + 1` window variables and return
/// the exact nullspace, with survivors re-verified out to `2 * samples`.
pub fn find_cancelling_empirical<S: SequenceOracle + ?Sized>(
    o: &S,
    window_k: usize,
    degree_bound: u32,
    samples: u64,
) -> Result<EmpiricalSearch, CancelError> {
    let monos = monomials_up_to_degree(window_k + 1, degree_bound);
    let unknowns = monos.len() as u64;
    let needed = required_samples(unknowns);
    if samples < needed {
        return Err(CancelError::InsufficientSamples {
            needed,
            unknowns,
            got: samples,
        });
    }
    let prefix = o.prefix(samples + window_k as u64)?;
    let rows = window_rows(&prefix, window_k + 1, &monos, samples as usize);
    let basis_vecs = nullspace_basis(&rows, monos.len());
    let nullspace: Vec<MultiPoly> = basis_vecs
        .iter()
        .map(|v| {
            MultiPoly::from_terms(
                window_k + 1,
                monos.iter().cloned().zip(v.iter().cloned()),
            )
        })
        .collect();
    let mut certificates = Vec::new();
    for q in &nullspace {
        if verify_empirical(o, q, samples * 2)? == EmpiricalVerdict::Pass {
            certificates.push(CancellingCertificate {
                poly: q.clone(),
                mode: CertMode::Empirical {
                    samples: samples * 2,
                },
            });
        }
    }
    Ok(EmpiricalSearch {
        window: window_k + 1,
        degree_bound,
        samples,
        nullspace,
        certificates,
    })
}

fn window_rows(
    prefix: &[Rat],
    window_len: usize,
    monos: &[Monomial],
    samples: usize,
) -> Vec<Vec<Rat>> {
    let max_e = monos
        .iter()
        .flat_map(|m| m.exponents().iter().copied())
        .max()
        .unwrap_or(0) as usize;
    (0..samples)
        .map(|n| {
            let window = &prefix[n..n + window_len];
            // powers[i][e] = window[i]^e
            let powers: Vec<Vec<Rat>> = window
                .iter()
                .map(|v| {
                    let mut ps = Vec::with_capacity(max_e + 1);
                    ps.push(Rat::from(num_bigint::BigInt::from(1)));
                    for e in 1..=max_e {
                        let next = &ps[e - 1] * v;
                        ps.push(next);
                    }
                    ps
                })
                .collect();
            monos
                .iter()
                .map(|m| {
                    let mut acc = Rat::from(num_bigint::BigInt::from(1));
                    for (i, &e) in m.exponents().iter().enumerate() {
                        if e > 0 {
                            acc *= &powers[i][e as usize];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Outcome of the restricted search for a single polynomial recurrence
/// `u_{n+k} = P(u_n, ..., u_{n+k-1})`.
#[derive(Debug, Clone)]
pub struct SimpleSearch {
    pub window: usize,
    pub degree_bound: u32,
    pub samples: u64,
    /// Whether the sampled interpolation conditions admit any solution at
    /// all. `false` is conclusive: no recurrence of this order and degree
    /// exists, because the conditions are necessary.
    pub consistent: bool,
    /// A rule fitting all samples, in the `k` window variables. The full
    /// solution set is `particular + span(homogeneous)`.
    pub particular: Option<MultiPoly>,
    pub homogeneous: Vec<MultiPoly>,
    /// Candidate window polynomials `x_k - P(x_0..x_{k-1})`: the particular
    /// solution and its translates along each homogeneous direction.
    pub candidates: Vec<MultiPoly>,
    /// Candidates that survived re-verification out to `2 * samples`.
    pub certificates: Vec<CancellingCertificate>,
}

impl SimpleSearch {
    pub fn conclusively_none(&self) -> bool {
        !self.consistent
    }

    /// Whether `rule` (a polynomial in the `k` window variables) fits every
    /// sample, i.e. lies in the affine solution set.
    pub fn admits_rule(&self, rule: &MultiPoly) -> bool {
        let Some(part) = &self.particular else {
            return false;
        };
        let diff = rule.sub(part);
        if diff.is_zero() {
            return true;
        }
        poly_in_span(&self.homogeneous, &diff)
    }
}

/// Whether `target` lies in the rational span of `basis`.
pub(crate) fn poly_in_span(basis: &[MultiPoly], target: &MultiPoly) -> bool {
    if target.is_zero() {
        return true;
    }
    let mut support = std::collections::BTreeSet::new();
    for p in basis.iter().chain(std::iter::once(target)) {
        for (m, _) in p.terms() {
            support.insert(m.clone());
        }
    }
    let support: Vec<Monomial> = support.into_iter().collect();
    let row = |p: &MultiPoly| -> Vec<Rat> { support.iter().map(|m| p.coeff(m)).collect() };
    let rows_basis: Vec<Vec<Rat>> = basis.iter().map(row).collect();
    let mut rows_all = rows_basis.clone();
    rows_all.push(row(target));
    crate::linalg::rank(&rows_basis, support.len())
        == crate::linalg::rank(&rows_all, support.len())
}

/// Fit `u_{n+k} = P(u_n, ..., u_{n+k-1})` with `deg P <= degree_bound` to
/// sampled values, exactly. The window polynomial form is fixed: coefficient
/// 1 on `x_k` and no other monomial containing `x_k`.
pub fn find_simple_recurrence<S: SequenceOracle + ?Sized>(
    o: &S,
    window_k: usize,
    degree_bound: u32,
    samples: u64,
) -> Result<SimpleSearch, CancelError> {
    assert!(window_k >= 1, "recurrence order must be at least 1");
    let monos = monomials_up_to_degree(window_k, degree_bound);
    let unknowns = monos.len() as u64;
    let needed = required_samples(unknowns);
    if samples < needed {
        return Err(CancelError::InsufficientSamples {
            needed,
            unknowns,
            got: samples,
        });
    }
    let prefix = o.prefix(samples + window_k as u64)?;
    let rows = window_rows(&prefix, window_k, &monos, samples as usize);
    let rhs: Vec<Rat> = (0..samples as usize)
        .map(|n| prefix[n + window_k].clone())
        .collect();

    let Some((particular, homogeneous)) = crate::linalg::solve_affine(&rows, &rhs) else {
        return Ok(SimpleSearch {
            window: window_k + 1,
            degree_bound,
            samples,
            consistent: false,
            particular: None,
            homogeneous: vec![],
            candidates: vec![],
            certificates: vec![],
        });
    };

    let to_rule = |coeffs: &[Rat]| -> MultiPoly {
        MultiPoly::from_terms(window_k, monos.iter().cloned().zip(coeffs.iter().cloned()))
    };
    let to_window_poly = |p: &MultiPoly| -> MultiPoly {
        MultiPoly::var(window_k + 1, window_k).sub(&p.pad_vars(window_k + 1))
    };
    let particular_rule = to_rule(&particular);
    let homogeneous_rules: Vec<MultiPoly> = homogeneous.iter().map(|h| to_rule(h)).collect();
    let mut candidates = vec![to_window_poly(&particular_rule)];
    for h in &homogeneous_rules {
        candidates.push(to_window_poly(&particular_rule.add(h)));
    }

    let mut certificates = Vec::new();
    for q in &candidates {
        if verify_empirical(o, q, samples * 2)? == EmpiricalVerdict::Pass {
            certificates.push(CancellingCertificate {
                poly: q.clone(),
                mode: CertMode::Empirical {
                    samples: samples * 2,
                },
            });
        }
    }
    Ok(SimpleSearch {
        window: window_k + 1,
        degree_bound,
        samples,
        consistent: true,
        particular: Some(particular_rule),
        homogeneous: homogeneous_rules,
        candidates,
        certificates,
    })
}

#[cfg(test)]
mod tests;
