//! The stock example systems, plus the general construction of `r^Q(n)` for
//! rational `r` and integer-valued `Q`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{EngineError, PolySystem};
use crate::poly::{int, rat_pow, MultiPoly, Rat, UniPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// f' = g, g' = f + g, starting (0, 1); output f_n = Fibonacci(n).
    Fibonacci,
    /// b' = b*c, c' = c + 1, starting (1, 1); output b_n = n!.
    Factorial,
    /// a' = a + 2b + c, b' = b + c, c' = c, starting (0, 0, 1); output n^2.
    NSquared,
    /// a' = a^2 starting 2; output 2^(2^n).
    PowerTower,
    /// d' = 2*d*e^2, e' = 2e, starting (1, 1); output 2^(n^2).
    TwoPowNSq,
}

pub fn builtin_names() -> &'static [&'static str] {
    &[
        "fibonacci",
        "factorial",
        "nsquared",
        "power_tower",
        "two_pow_nsq",
    ]
}

pub fn builtin_by_name(name: &str) -> Result<PolySystem, EngineError> {
    let b = match name {
        "fibonacci" => Builtin::Fibonacci,
        "factorial" => Builtin::Factorial,
        "nsquared" => Builtin::NSquared,
        "power_tower" => Builtin::PowerTower,
        "two_pow_nsq" => Builtin::TwoPowNSq,
        _ => return Err(EngineError::UnknownBuiltin(name.to_string())),
    };
    Ok(builtin(b))
}

pub fn builtin(which: Builtin) -> PolySystem {
    let x = MultiPoly::var;
    match which {
        Builtin::Fibonacci => PolySystem::new(
            vec![x(2, 1), x(2, 0).add(&x(2, 1))],
            vec![int(0), int(1)],
            0,
        ),
        Builtin::Factorial => PolySystem::new(
            vec![x(2, 0).mul(&x(2, 1)), x(2, 1).add(&MultiPoly::one(2))],
            vec![int(1), int(1)],
            0,
        ),
        Builtin::NSquared => PolySystem::new(
            vec![
                x(3, 0).add(&x(3, 1).scale(&int(2))).add(&x(3, 2)),
                x(3, 1).add(&x(3, 2)),
                x(3, 2),
            ],
            vec![int(0), int(0), int(1)],
            0,
        ),
        Builtin::PowerTower => PolySystem::new(vec![x(1, 0).pow(2)], vec![int(2)], 0),
        Builtin::TwoPowNSq => PolySystem::new(
            vec![
                x(2, 0).mul(&x(2, 1).pow(2)).scale(&int(2)),
                x(2, 1).scale(&int(2)),
            ],
            vec![int(1), int(1)],
            0,
        ),
    }
    .expect("builtin systems are well-formed")
}

/// System computing `r^Q(n)` for nonzero rational `r` and a polynomial `Q`
/// taking integer values on the naturals.
///
/// Uses a chain of finite differences: with `D` the forward difference
/// operator, the sequences `v_i(n) = r^(D^i Q)(n)` satisfy
/// `v_i' = v_i * v_{i+1}` and the last one is constant.
pub fn r_pow_q(r: &Rat, q: &UniPoly) -> Result<PolySystem, EngineError> {
    if r.is_zero() {
        return Err(EngineError::ZeroBase);
    }
    if r.is_one() {
        // 1^anything = 1, regardless of whether Q is integer-valued.
        return PolySystem::new(vec![MultiPoly::var(1, 0)], vec![int(1)], 0);
    }

    // Finite differences of Q at 0: Q, DQ, D^2 Q, ... down to a constant.
    let mut diffs = Vec::new();
    let mut cur = q.clone();
    loop {
        diffs.push(cur.eval(&int(0)));
        if cur.degree().unwrap_or(0) == 0 {
            break;
        }
        // (DQ)(x) = Q(x+1) - Q(x)
        let shifted = shift_by_one(&cur);
        cur = shifted.sub(&cur);
    }
    for d in &diffs {
        if !d.is_integer() {
            return Err(EngineError::NonIntegerExponent(format!(
                "difference value {d} at 0"
            )));
        }
    }

    let k = diffs.len();
    let mut rules = Vec::with_capacity(k);
    for i in 0..k - 1 {
        rules.push(MultiPoly::var(k, i).mul(&MultiPoly::var(k, i + 1)));
    }
    rules.push(MultiPoly::var(k, k - 1));
    let init = diffs
        .iter()
        .map(|d| rat_signed_pow(r, d.numer()))
        .collect();
    PolySystem::new(rules, init, 0)
}

fn shift_by_one(p: &UniPoly) -> UniPoly {
    // p(x + 1) via binomial expansion of each power
    let mut acc = UniPoly::zero();
    let x_plus_1 = UniPoly::x_plus(1);
    for (e, c) in p.coeffs().iter().enumerate() {
        acc = acc.add(&x_plus_1.pow(e as u32).scale(c));
    }
    acc
}

fn rat_signed_pow(r: &Rat, e: &BigInt) -> Rat {
    let mag = u32::try_from(e.abs()).expect("exponent magnitude fits u32");
    let p = rat_pow(r, mag);
    if e.is_negative() {
        Rat::one() / p
    } else {
        p
    }
}
