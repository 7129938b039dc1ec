use super::*;
use crate::engines::{builtin, Builtin, OracleSequence};
use crate::linalg::rank;
use crate::poly::{int, MultiPoly};

fn x(n: usize, i: usize) -> MultiPoly {
    MultiPoly::var(n, i)
}

/// x0*x2 - x1^2 - x0*x1: the window polynomial of the factorial sequence.
fn factorial_window_poly() -> MultiPoly {
    x(3, 0)
        .mul(&x(3, 2))
        .sub(&x(3, 1).pow(2))
        .sub(&x(3, 0).mul(&x(3, 1)))
}

/// Whether `target` lies in the rational span of `basis` (coordinates over
/// the union of supports).
fn in_span(basis: &[MultiPoly], target: &MultiPoly) -> bool {
    let mut support = std::collections::BTreeSet::new();
    for p in basis.iter().chain(std::iter::once(target)) {
        for (m, _) in p.terms() {
            support.insert(m.clone());
        }
    }
    let support: Vec<_> = support.into_iter().collect();
    let row = |p: &MultiPoly| -> Vec<crate::poly::Rat> {
        support.iter().map(|m| p.coeff(m)).collect()
    };
    let rows_basis: Vec<Vec<crate::poly::Rat>> = basis.iter().map(row).collect();
    let mut rows_all = rows_basis.clone();
    rows_all.push(row(target));
    rank(&rows_basis, support.len()) == rank(&rows_all, support.len())
}

#[test]
fn iterate_factorial_two_steps() {
    let s = builtin(Builtin::Factorial);
    let it = iterate_rules(&s, 2, &Budget::default()).unwrap();
    // level 2 of the output: x0*x1^2 + x0*x1
    let expect = x(2, 0).mul(&x(2, 1).pow(2)).add(&x(2, 0).mul(&x(2, 1)));
    assert_eq!(it.get(2, 0), &expect);
    assert_eq!(it.depth(), 2);
}

#[test]
fn iterate_zero_depth_is_identity() {
    let s = builtin(Builtin::Fibonacci);
    let it = iterate_rules(&s, 0, &Budget::default()).unwrap();
    assert_eq!(it.get(0, 0), &x(2, 0));
    assert_eq!(it.get(0, 1), &x(2, 1));
}

#[test]
fn iterate_squaring_rule() {
    let s = builtin(Builtin::PowerTower);
    let it = iterate_rules(&s, 3, &Budget::default()).unwrap();
    assert_eq!(it.get(3, 0), &x(1, 0).pow(8));
}

#[test]
fn iterates_evaluate_to_shifted_outputs() {
    // level t on the state at n equals the output at n + t
    for b in [Builtin::Fibonacci, Builtin::Factorial, Builtin::NSquared, Builtin::TwoPowNSq] {
        let s = builtin(b);
        let it = iterate_rules(&s, 4, &Budget::default()).unwrap();
        for n in 0..=8u64 {
            let state = s.eval_state(n).unwrap();
            for t in 0..=4u64 {
                let got = it
                    .get(t as usize, s.output_index())
                    .evaluate(&state)
                    .unwrap();
                assert_eq!(got, s.eval_output(n + t).unwrap(), "{b:?} n={n} t={t}");
            }
        }
    }
}

#[test]
fn iterate_budget_error() {
    let s = builtin(Builtin::Factorial);
    let err = iterate_rules(&s, 12, &Budget { max_terms: 4 }).unwrap_err();
    assert!(matches!(err, CancelError::BudgetExceeded { .. }));
}

#[test]
fn symbolic_search_factorial_degree_two() {
    let s = builtin(Builtin::Factorial);
    let search = find_cancelling_symbolic(&s, 2, &Budget::default()).unwrap();
    assert!(!search.basis.is_empty());
    assert!(in_span(&search.basis, &factorial_window_poly()));
    // every certificate is symbolic and survives exact verification
    for cert in &search.certificates {
        assert_eq!(cert.mode, CertMode::Symbolic);
        assert_eq!(
            verify_symbolic(&s, &cert.poly, &Budget::default()).unwrap(),
            SymbolicVerdict::Cancelling
        );
    }
}

#[test]
fn symbolic_search_fibonacci_degree_one() {
    let s = builtin(Builtin::Fibonacci);
    let search = find_cancelling_symbolic(&s, 1, &Budget::default()).unwrap();
    // x2 - x1 - x0 up to scalar
    let expect = x(3, 2).sub(&x(3, 1)).sub(&x(3, 0));
    assert!(search.basis.iter().any(|q| q.is_scalar_multiple_of(&expect)));
}

#[test]
fn symbolic_search_identity_constant_system() {
    // one sequence with the identity rule: consecutive values are equal
    let s = PolySystem::new(vec![x(1, 0)], vec![int(4)], 0).unwrap();
    let search = find_cancelling_symbolic(&s, 1, &Budget::default()).unwrap();
    let expect = x(2, 1).sub(&x(2, 0));
    assert!(search.basis.iter().any(|q| q.is_scalar_multiple_of(&expect)));
}

#[test]
fn verify_symbolic_factorial_example() {
    let s = builtin(Builtin::Factorial);
    assert_eq!(
        verify_symbolic(&s, &factorial_window_poly(), &Budget::default()).unwrap(),
        SymbolicVerdict::Cancelling
    );
    // x0 - x1 fails; the residual lives in the system's state variables:
    // G0 - G1 = b - b*c
    let q = x(2, 0).sub(&x(2, 1));
    let verdict = verify_symbolic(&s, &q, &Budget::default()).unwrap();
    let expect_residual = x(2, 0).sub(&x(2, 0).mul(&x(2, 1)));
    assert_eq!(
        verdict,
        SymbolicVerdict::NotCancelling {
            residual: expect_residual
        }
    );
}

#[test]
fn verify_symbolic_rejects_zero() {
    let s = builtin(Builtin::Factorial);
    assert!(matches!(
        verify_symbolic(&s, &MultiPoly::zero(3), &Budget::default()),
        Err(CancelError::ZeroPolynomial)
    ));
}

#[test]
fn verify_empirical_nn_counterexample_at_zero() {
    let nn = OracleSequence::NN;
    let verdict = verify_empirical(&nn, &factorial_window_poly(), 10).unwrap();
    assert_eq!(
        verdict,
        EmpiricalVerdict::Counterexample { n: 0, value: int(2) }
    );
}

#[test]
fn verify_empirical_factorial_passes() {
    let o = OracleSequence::Factorial;
    assert_eq!(
        verify_empirical(&o, &factorial_window_poly(), 50).unwrap(),
        EmpiricalVerdict::Pass
    );
    assert!(matches!(
        verify_empirical(&o, &MultiPoly::zero(3), 10),
        Err(CancelError::ZeroPolynomial)
    ));
}

#[test]
fn empirical_search_factorial_recovers_direction() {
    let o = OracleSequence::Factorial;
    let search = find_cancelling_empirical(&o, 2, 2, 40).unwrap();
    assert!(!search.conclusively_empty());
    assert!(in_span(&search.nullspace, &factorial_window_poly()));
    assert!(!search.certificates.is_empty());
}

#[test]
fn empirical_search_nn_is_conclusively_empty() {
    let o = OracleSequence::NN;
    let search = find_cancelling_empirical(&o, 2, 2, 30).unwrap();
    assert!(search.conclusively_empty());
    assert!(search.certificates.is_empty());
}

#[test]
fn empirical_search_catalan_finds_elimination_identity() {
    // Eliminating n between (n+2)C_{n+1} = (4n+2)C_n at consecutive indices
    // leaves -10x0x2 + 16x0x1 + x1x2 + 2x1^2, a genuine degree-2 window
    // identity for Catalan numbers. Admitting a window polynomial is weaker
    // than being recursively definable by polynomial rules, so this coexists
    // with Catalan's non-definability.
    let o = OracleSequence::Catalan;
    let search = find_cancelling_empirical(&o, 2, 2, 40).unwrap();
    assert!(!search.conclusively_empty());
    let identity = x(3, 0)
        .mul(&x(3, 2))
        .scale(&int(-10))
        .add(&x(3, 0).mul(&x(3, 1)).scale(&int(16)))
        .add(&x(3, 1).mul(&x(3, 2)))
        .add(&x(3, 1).pow(2).scale(&int(2)));
    assert_eq!(
        verify_empirical(&o, &identity, 300).unwrap(),
        EmpiricalVerdict::Pass
    );
    assert!(in_span(&search.nullspace, &identity));
    assert!(!search.certificates.is_empty());
}

#[test]
fn empirical_search_rejects_underdetermined() {
    let o = OracleSequence::Factorial;
    // 20 unknowns at degree 3 need 25 samples
    let err = find_cancelling_empirical(&o, 2, 3, 20).unwrap_err();
    assert!(matches!(err, CancelError::InsufficientSamples { needed: 25, .. }));
}

#[test]
fn empirical_nullspace_shrinks_with_more_samples() {
    // necessary conditions accumulate: the nullspace at N + 10 spans a
    // subspace of the nullspace at N
    let o = OracleSequence::custom("period3", |n| int([2, 7, 1][(n % 3) as usize]));
    let a = find_cancelling_empirical(&o, 1, 2, 20).unwrap();
    let b = find_cancelling_empirical(&o, 1, 2, 30).unwrap();
    assert!(b.nullspace.len() <= a.nullspace.len());
    for q in &b.nullspace {
        assert!(in_span(&a.nullspace, q));
    }
}

#[test]
fn empirical_certificates_survive_on_engine_backed_sequences() {
    // engine as the sequence source: the factorial system itself
    let s = builtin(Builtin::Factorial);
    let search = find_cancelling_empirical(&s, 2, 2, 40).unwrap();
    assert!(in_span(&search.nullspace, &factorial_window_poly()));
}

#[test]
fn empirical_search_through_rational_engine() {
    // the rational-step system and the closed-form oracle define the same
    // sequence, so their sampled nullspaces coincide
    let c_num = x(2, 1)
        .scale(&int(4))
        .add(&MultiPoly::constant(2, int(2)))
        .mul(&x(2, 0));
    let c_den = x(2, 1).add(&MultiPoly::constant(2, int(2)));
    let m_num = x(2, 1).add(&MultiPoly::one(2));
    let system = crate::engines::RationalSystem::new(
        vec![(c_num, c_den), (m_num, MultiPoly::one(2))],
        vec![int(1), int(0)],
        0,
    )
    .unwrap();
    let via_engine = find_cancelling_empirical(&system, 2, 2, 40).unwrap();
    let via_oracle = find_cancelling_empirical(&OracleSequence::Catalan, 2, 2, 40).unwrap();
    assert_eq!(via_engine.nullspace, via_oracle.nullspace);
    assert!(!via_engine.conclusively_empty());
}

#[test]
fn simple_search_factorial_has_no_solutions() {
    let o = OracleSequence::Factorial;
    for k in 1..=3usize {
        for d in 1..=3u32 {
            let search = find_simple_recurrence(&o, k, d, 50).unwrap();
            assert!(
                search.certificates.is_empty(),
                "no recurrence of order {k}, degree {d} should fit n!"
            );
        }
    }
}

#[test]
fn simple_search_fibonacci_finds_sum_rule() {
    let o = OracleSequence::custom("fib", {
        let s = builtin(Builtin::Fibonacci);
        move |n| s.eval_output(n).unwrap()
    });
    let search = find_simple_recurrence(&o, 2, 1, 10).unwrap();
    assert!(search.consistent);
    let expect = x(3, 2).sub(&x(3, 1)).sub(&x(3, 0));
    assert!(search
        .certificates
        .iter()
        .any(|c| c.poly.is_scalar_multiple_of(&expect)));
}

#[test]
fn simple_search_squares_order_three() {
    let o = OracleSequence::custom("n^2", |n| int((n * n) as i64));
    let search = find_simple_recurrence(&o, 3, 1, 15).unwrap();
    assert!(search.consistent);
    // squares satisfy a one-parameter family of affine order-3 rules; the
    // classic 3x2 - 3x1 + x0 must lie in the solution set
    let classic = x(3, 2)
        .scale(&int(3))
        .sub(&x(3, 1).scale(&int(3)))
        .add(&x(3, 0));
    assert!(search.admits_rule(&classic));
    // and every surviving candidate really holds far beyond the samples
    assert!(!search.certificates.is_empty());
    for c in &search.certificates {
        assert_eq!(
            verify_empirical(&o, &c.poly, 200).unwrap(),
            EmpiricalVerdict::Pass
        );
    }
}

#[test]
fn symbolic_certificates_hold_empirically() {
    // soundness: an exact certificate passes sampling on the engine output
    let s = builtin(Builtin::Factorial);
    let search = find_cancelling_symbolic(&s, 2, &Budget::default()).unwrap();
    for cert in &search.certificates {
        assert_eq!(
            verify_empirical(&s, &cert.poly, 200).unwrap(),
            EmpiricalVerdict::Pass
        );
    }
}
