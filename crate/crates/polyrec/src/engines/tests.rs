use num_bigint::BigInt;

use super::*;
use crate::poly::{int, rat, MultiPoly};

fn x(n: usize, i: usize) -> MultiPoly {
    MultiPoly::var(n, i)
}

#[test]
fn fibonacci_system_output() {
    let s = builtin(Builtin::Fibonacci);
    let expect = [0i64, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55];
    for (n, e) in expect.iter().enumerate() {
        assert_eq!(s.eval_output(n as u64).unwrap(), int(*e));
    }
}

#[test]
fn one_sequence_squaring() {
    // a_0 = 2, a' = a^2 gives 2^(2^n); at n = 3 the value is 256
    let s = PolySystem::new(vec![x(1, 0).pow(2)], vec![int(2)], 0).unwrap();
    assert_eq!(s.eval_output(3).unwrap(), int(256));
}

#[test]
fn state_iterator_is_deterministic() {
    let s = builtin(Builtin::Factorial);
    let a: Vec<_> = s.states().take(10).map(|r| r.unwrap()).collect();
    let b: Vec<_> = s.states().take(10).map(|r| r.unwrap()).collect();
    assert_eq!(a, b);
}

#[test]
fn output_prefix_matches_pointwise() {
    let s = builtin(Builtin::NSquared);
    let prefix = s.output_prefix(20).unwrap();
    for (n, v) in prefix.iter().enumerate() {
        assert_eq!(*v, s.eval_output(n as u64).unwrap());
    }
}

#[test]
fn overflow_guard_trips_before_memory_does() {
    let s = builtin(Builtin::PowerTower);
    let err = s.eval_output(40).unwrap_err();
    match err {
        EngineError::Overflow { step, max_bits } => {
            assert!(step <= 25, "guard should trip long before step 40");
            assert_eq!(max_bits, 1 << 20);
        }
        other => panic!("expected Overflow, got {other:?}"),
    }
    // small values still evaluate under the default guard
    assert_eq!(
        s.eval_output(4).unwrap(),
        Rat::from(BigInt::from(2).pow(16))
    );
}

#[test]
fn state_iter_fuses_after_error() {
    let s = builtin(Builtin::PowerTower);
    let mut iter = s.states_with(EvalLimits { max_bits: 8 });
    let mut saw_err = false;
    let mut after_err = 0;
    for item in iter.by_ref().take(10) {
        if saw_err {
            after_err += 1;
        }
        if item.is_err() {
            saw_err = true;
        }
    }
    assert!(saw_err);
    assert_eq!(after_err, 0);
    assert!(iter.next().is_none());
}

#[test]
fn linear_recurrence_fibonacci() {
    let r = LinearRecurrence::new(vec![int(1), int(1)], vec![int(0), int(1)], None).unwrap();
    assert_eq!(r.eval(10), int(55));
    assert_eq!(r.eval(0), int(0));
    assert_eq!(r.eval(1), int(1));
}

#[test]
fn linear_recurrence_squares_order_three() {
    // u_{n+3} = 3u_{n+2} - 3u_{n+1} + u_n with 0, 1, 4 gives n^2
    let r = LinearRecurrence::new(
        vec![int(1), int(-3), int(3)],
        vec![int(0), int(1), int(4)],
        None,
    )
    .unwrap();
    assert_eq!(r.eval(7), int(49));
    for n in 0..=30u64 {
        assert_eq!(r.eval(n), int((n * n) as i64));
    }
}

#[test]
fn order_one_identity_recurrence() {
    let q = rat(3, 7);
    let r = LinearRecurrence::new(vec![int(1)], vec![q.clone()], None).unwrap();
    for n in 0..10 {
        assert_eq!(r.eval(n), q);
    }
}

#[test]
fn affine_recurrence_constant_term() {
    // u_{n+1} = u_n + 2, u_0 = 1 -> 2n + 1
    let r = LinearRecurrence::new(vec![int(1)], vec![int(1)], Some(int(2))).unwrap();
    for n in 0..10u64 {
        assert_eq!(r.eval(n), int((2 * n + 1) as i64));
    }
}

#[test]
fn simple_recurrence_matches_rule() {
    // u_{n+2} = u_{n+1} * u_n with 1, 2: 1, 2, 2, 4, 8, 32, ...
    let rule = x(2, 0).mul(&x(2, 1));
    let r = SimpleRecurrence::new(rule, vec![int(1), int(2)]).unwrap();
    let vals = r.prefix(6);
    assert_eq!(
        vals,
        vec![int(1), int(2), int(2), int(4), int(8), int(32), int(256)]
    );
}

#[test]
fn rational_catalan_system() {
    // C' = (4m + 2)/(m + 2) * C, m' = m + 1, starting (1, 0)
    let c_num = x(2, 1).scale(&int(4)).add(&MultiPoly::constant(2, int(2))).mul(&x(2, 0));
    let c_den = x(2, 1).add(&MultiPoly::constant(2, int(2)));
    let m_num = x(2, 1).add(&MultiPoly::one(2));
    let m_den = MultiPoly::one(2);
    let s = RationalSystem::new(vec![(c_num, c_den), (m_num, m_den)], vec![int(1), int(0)], 0)
        .unwrap();
    assert_eq!(s.eval_output(0).unwrap(), int(1));
    assert_eq!(s.eval_output(5).unwrap(), int(42));
    let oracle = OracleSequence::Catalan;
    for n in 0..=15u64 {
        assert_eq!(s.eval_output(n).unwrap(), oracle.eval(n));
    }
}

#[test]
fn rational_system_denominator_vanishes() {
    // denominator x2 - 1 with the ancillary sequence hitting 1 at step 1
    let num = x(2, 0);
    let den = x(2, 1).sub(&MultiPoly::one(2));
    let m_num = x(2, 1).add(&MultiPoly::one(2));
    let m_den = MultiPoly::one(2);
    let s = RationalSystem::new(vec![(num, den), (m_num, m_den)], vec![int(1), int(0)], 0)
        .unwrap();
    // step 0 (state m=0) is fine; at step 1 the state has m=1 and den = 0
    assert!(s.eval_output(1).is_ok());
    assert_eq!(
        s.eval_output(2).unwrap_err(),
        EngineError::DenominatorVanished { step: 1, rule: 0 }
    );
}

#[test]
fn rational_system_rejects_zero_denominator_poly() {
    let err = RationalSystem::new(
        vec![(x(1, 0), MultiPoly::zero(1))],
        vec![int(1)],
        0,
    )
    .unwrap_err();
    assert!(matches!(err, EngineError::InvalidSystem(_)));
}

#[test]
fn system_construction_errors() {
    assert!(PolySystem::new(vec![], vec![], 0).is_err());
    assert!(PolySystem::new(vec![x(1, 0)], vec![int(1), int(2)], 0).is_err());
    assert!(PolySystem::new(vec![x(2, 0)], vec![int(1)], 0).is_err());
    assert!(PolySystem::new(vec![x(1, 0)], vec![int(1)], 1).is_err());
}

#[test]
fn sequence_oracle_prefix_agrees() {
    let s = builtin(Builtin::Fibonacci);
    let p = SequenceOracle::prefix(&s, 12).unwrap();
    assert_eq!(p.len(), 12);
    for (n, v) in p.iter().enumerate() {
        assert_eq!(*v, SequenceOracle::value(&s, n as u64).unwrap());
    }
    assert!(SequenceOracle::prefix(&s, 0).unwrap().is_empty());
}
