//! Transforms that put a polynomial system into integer-initial, homogeneous,
//! integer-coefficient shape while tracking how the output was rescaled.
//!
//! - `integerize_initials`: replace sequence `i` by `q_i` times itself, where
//!   `q_i` is the denominator of its initial value; rules are rewritten by
//!   substituting `x_i / q_i` and scaling rule `i` by `q_i`. Output values
//!   are unchanged (the output sequence itself is never rescaled).
//! - `homogenize`: pad every monomial to one common total degree `d >= 2`
//!   with powers of an appended constantly-1 sequence whose rule is
//!   `x_{k+1}^d`. Output values are unchanged.
//! - `integer_scale`: multiply every rule by the least common denominator
//!   `a` of the coefficients. On a degree-`d` homogeneous system this scales
//!   the state at step `n` by `a^((d^n - 1)/(d - 1))`; the rules gain integer
//!   coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::engines::{EngineError, PolySystem};
use crate::poly::{rat_pow, Monomial, MultiPoly, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("requested degree {requested} is smaller than the maximal rule degree {max_degree}")]
    DegreeTooSmall { requested: u32, max_degree: u32 },
    #[error("rule {rule} is not homogeneous of one common degree")]
    NotHomogeneous { rule: usize },
    #[error("initial value {0} is not an integer")]
    NonIntegerInitial(String),
    #[error("common degree must be at least 2, got {0}")]
    DegreeBelowTwo(u32),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl NormalizeError {
    pub fn name(&self) -> &'static str {
        match self {
            NormalizeError::DegreeTooSmall { .. } => "DegreeTooSmall",
            NormalizeError::NotHomogeneous { .. } => "NotHomogeneous",
            NormalizeError::NonIntegerInitial(_) => "NonIntegerInitial",
            NormalizeError::DegreeBelowTwo(_) => "DegreeBelowTwo",
            NormalizeError::Engine(e) => e.name(),
        }
    }
}

/// Bookkeeping for the full pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingMeta {
    /// Coefficient-clearing scalar (1 when rules were already integral).
    pub a: BigInt,
    /// Common total degree of the homogenized rules.
    pub d: u32,
    /// Per-sequence denominators used to clear initial values.
    pub qs: Vec<BigInt>,
    /// Whether the output initial value was an integer. When false, the
    /// output sequence was left untouched and only auxiliary sequences were
    /// rescaled.
    pub output_integral: bool,
}

/// Rescale sequences so every initial value is an integer. Returns the new
/// system, the per-sequence scalars `q_i`, and whether the output initial
/// was itself integral (it is never rescaled, so a fractional output initial
/// survives the transform).
pub fn integerize_initials(s: &PolySystem) -> (PolySystem, Vec<BigInt>, bool) {
    let k = s.dim();
    let output_integral = s.init()[s.output_index()].is_integer();
    let qs: Vec<BigInt> = (0..k)
        .map(|i| {
            if i == s.output_index() {
                BigInt::one()
            } else {
                s.init()[i].denom().clone()
            }
        })
        .collect();

    if qs.iter().all(|q| q.is_one()) {
        return (s.clone(), qs, output_integral);
    }

    // Rule i becomes q_i * P_i(x_1/q_1, ..., x_k/q_k); per term this scales
    // the coefficient by q_i / prod_j q_j^e_j.
    let rules: Vec<MultiPoly> = s
        .rules()
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            MultiPoly::from_terms(
                k,
                rule.terms().map(|(m, c)| {
                    let mut factor = Rat::from(qs[i].clone());
                    for (j, &e) in m.exponents().iter().enumerate() {
                        if e > 0 {
                            factor /= rat_pow(&Rat::from(qs[j].clone()), e);
                        }
                    }
                    (m.clone(), c * factor)
                }),
            )
        })
        .collect();
    let init: Vec<Rat> = s
        .init()
        .iter()
        .zip(&qs)
        .map(|(v, q)| v * Rat::from(q.clone()))
        .collect();
    let sys = PolySystem::new(rules, init, s.output_index()).expect("same shape as input");
    (sys, qs, output_integral)
}

/// Pad every monomial of every rule to total degree `d` using an appended
/// constantly-1 sequence with rule `x_{k+1}^d`. `d` defaults to
/// `max(2, max rule degree)` and must be at least both.
pub fn homogenize(s: &PolySystem, d: Option<u32>) -> Result<(PolySystem, u32), NormalizeError> {
    let max_degree = s
        .rules()
        .iter()
        .filter_map(|r| r.total_degree())
        .max()
        .unwrap_or(0);
    let d = d.unwrap_or_else(|| max_degree.max(2));
    if d < 2 {
        return Err(NormalizeError::DegreeBelowTwo(d));
    }
    if d < max_degree {
        return Err(NormalizeError::DegreeTooSmall {
            requested: d,
            max_degree,
        });
    }
    let k = s.dim();
    let mut rules: Vec<MultiPoly> = s
        .rules()
        .iter()
        .map(|rule| {
            MultiPoly::from_terms(
                k + 1,
                rule.terms().map(|(m, c)| {
                    let pad = d - m.total_degree();
                    let mut exps = m.exponents().to_vec();
                    exps.push(pad);
                    (Monomial::from_exponents(exps), c.clone())
                }),
            )
        })
        .collect();
    rules.push(MultiPoly::var(k + 1, k).pow(d));
    let mut init = s.init().to_vec();
    init.push(Rat::one());
    let sys = PolySystem::new(rules, init, s.output_index()).expect("padded system is well-formed");
    Ok((sys, d))
}

/// Clear rule denominators on a homogeneous integer-initial system. The new
/// rules are `a * P_i` with `a` the lcm of all coefficient denominators; the
/// transformed state at step `n` equals `a^((d^n - 1)/(d - 1))` times the
/// original state.
pub fn integer_scale(s: &PolySystem) -> Result<(PolySystem, BigInt), NormalizeError> {
    let d = common_degree(s)?;
    if d < 2 {
        return Err(NormalizeError::DegreeBelowTwo(d));
    }
    for v in s.init() {
        if !v.is_integer() {
            return Err(NormalizeError::NonIntegerInitial(v.to_string()));
        }
    }
    let mut a = BigInt::one();
    for rule in s.rules() {
        for (_, c) in rule.terms() {
            a = a.lcm(c.denom());
        }
    }
    let factor = Rat::from(a.clone());
    let rules: Vec<MultiPoly> = s.rules().iter().map(|r| r.scale(&factor)).collect();
    debug_assert!(rules.iter().all(|r| r.has_integer_coeffs()));
    let sys =
        PolySystem::new(rules, s.init().to_vec(), s.output_index()).expect("same shape as input");
    Ok((sys, a))
}

/// The common total degree of all monomials in all rules. Zero rules are
/// allowed (they have no monomials to pad).
fn common_degree(s: &PolySystem) -> Result<u32, NormalizeError> {
    let mut degree = None;
    for (i, rule) in s.rules().iter().enumerate() {
        for (m, _) in rule.terms() {
            match degree {
                None => degree = Some(m.total_degree()),
                Some(d) if d == m.total_degree() => {}
                Some(_) => return Err(NormalizeError::NotHomogeneous { rule: i }),
            }
        }
    }
    Ok(degree.unwrap_or(2))
}

/// integerize -> homogenize -> integer_scale. Never fails when the output
/// initial value is an integer.
pub fn pipeline(s: &PolySystem) -> Result<(PolySystem, ScalingMeta), NormalizeError> {
    let (s1, qs, output_integral) = integerize_initials(s);
    let (s2, d) = homogenize(&s1, None)?;
    let (s3, a) = integer_scale(&s2)?;
    Ok((
        s3,
        ScalingMeta {
            a,
            d,
            qs,
            output_integral,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{builtin, Builtin};
    use crate::poly::{int, rat};

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn integerize_half_initial() {
        // u' = u*v, v' = v with v_0 = 1/2
        let s = PolySystem::new(
            vec![x(2, 0).mul(&x(2, 1)), x(2, 1)],
            vec![int(1), rat(1, 2)],
            0,
        )
        .unwrap();
        let (t, qs, ok) = integerize_initials(&s);
        assert!(ok);
        assert_eq!(qs, vec![BigInt::one(), BigInt::from(2)]);
        assert!(t.init().iter().all(|v| v.is_integer()));
        for n in 0..=30u64 {
            assert_eq!(t.eval_output(n).unwrap(), s.eval_output(n).unwrap());
        }
    }

    #[test]
    fn integerize_integer_initials_is_identity() {
        let s = builtin(Builtin::Factorial);
        let (t, qs, ok) = integerize_initials(&s);
        assert!(ok);
        assert_eq!(t, s);
        assert!(qs.iter().all(|q| q.is_one()));
    }

    #[test]
    fn integerize_uses_reduced_denominators() {
        let s = PolySystem::new(
            vec![x(2, 0), x(2, 1)],
            vec![int(3), rat(2, 4)], // 2/4 reduces to 1/2, so q = 2
            0,
        )
        .unwrap();
        let (_, qs, _) = integerize_initials(&s);
        assert_eq!(qs[1], BigInt::from(2));
    }

    #[test]
    fn integerize_fractional_output_initial_flagged() {
        let s = PolySystem::new(
            vec![x(2, 0), x(2, 1)],
            vec![rat(1, 3), rat(1, 2)],
            0,
        )
        .unwrap();
        let (t, qs, ok) = integerize_initials(&s);
        assert!(!ok);
        // output untouched, auxiliary cleared
        assert_eq!(qs[0], BigInt::one());
        assert_eq!(t.init()[0], rat(1, 3));
        assert_eq!(t.init()[1], int(1));
        for n in 0..=10u64 {
            assert_eq!(t.eval_output(n).unwrap(), s.eval_output(n).unwrap());
        }
    }

    #[test]
    fn homogenize_factorial_shape() {
        let s = builtin(Builtin::Factorial);
        let (t, d) = homogenize(&s, Some(2)).unwrap();
        assert_eq!(d, 2);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.rules()[0], x(3, 0).mul(&x(3, 1)));
        assert_eq!(t.rules()[1], x(3, 1).mul(&x(3, 2)).add(&x(3, 2).pow(2)));
        assert_eq!(t.rules()[2], x(3, 2).pow(2));
        let oracle = crate::engines::OracleSequence::Factorial;
        for n in 0..=15u64 {
            assert_eq!(t.eval_output(n).unwrap(), oracle.eval(n));
        }
    }

    #[test]
    fn homogenize_already_homogeneous() {
        let s = builtin(Builtin::PowerTower); // single rule x^2
        let (t, d) = homogenize(&s, None).unwrap();
        assert_eq!(d, 2);
        assert_eq!(t.dim(), 2);
        assert_eq!(t.rules()[0], x(2, 0).pow(2));
        assert_eq!(t.rules()[1], x(2, 1).pow(2));
    }

    #[test]
    fn homogenize_constant_rule_pads_fully() {
        let s = PolySystem::new(vec![MultiPoly::constant(1, int(5))], vec![int(0)], 0).unwrap();
        let (t, d) = homogenize(&s, Some(3)).unwrap();
        assert_eq!(d, 3);
        assert_eq!(t.rules()[0], x(2, 1).pow(3).scale(&int(5)));
        for n in 0..=6u64 {
            assert_eq!(t.eval_output(n).unwrap(), s.eval_output(n).unwrap());
        }
    }

    #[test]
    fn homogenize_rejects_small_degree() {
        let s = builtin(Builtin::Factorial);
        assert_eq!(
            homogenize(&s, Some(1)).unwrap_err(),
            NormalizeError::DegreeBelowTwo(1)
        );
        let c = builtin(Builtin::TwoPowNSq); // degree 3 rule 2*x0*x1^2
        assert_eq!(
            homogenize(&c, Some(2)).unwrap_err(),
            NormalizeError::DegreeTooSmall {
                requested: 2,
                max_degree: 3
            }
        );
    }

    #[test]
    fn integer_scale_clears_thirds() {
        // single rule x^2 / 3 is homogeneous of degree 2
        let s = PolySystem::new(vec![x(1, 0).pow(2).scale(&rat(1, 3))], vec![int(1)], 0).unwrap();
        let (t, a) = integer_scale(&s).unwrap();
        assert_eq!(a, BigInt::from(3));
        assert_eq!(t.rules()[0], x(1, 0).pow(2));
        // scaled state at n = 2 is a^((d^2-1)/(d-1)) = 27 times the original
        let orig = s.eval_output(2).unwrap();
        let scaled = t.eval_output(2).unwrap();
        assert_eq!(scaled, orig * int(27));
    }

    #[test]
    fn integer_scale_identity_when_integral() {
        let s = builtin(Builtin::PowerTower);
        let (h, _) = homogenize(&s, None).unwrap();
        let (t, a) = integer_scale(&h).unwrap();
        assert!(a.is_one());
        assert_eq!(t, h);
        // factorial homogenized also has integer coefficients already
        let (hf, _) = homogenize(&builtin(Builtin::Factorial), None).unwrap();
        let (_, af) = integer_scale(&hf).unwrap();
        assert!(af.is_one());
    }

    #[test]
    fn integer_scale_rejects_inhomogeneous() {
        let s = builtin(Builtin::Factorial);
        assert!(matches!(
            integer_scale(&s).unwrap_err(),
            NormalizeError::NotHomogeneous { .. }
        ));
    }

    #[test]
    fn integer_scale_rejects_fractional_initials() {
        let s = PolySystem::new(vec![x(1, 0).pow(2)], vec![rat(1, 2)], 0).unwrap();
        assert!(matches!(
            integer_scale(&s).unwrap_err(),
            NormalizeError::NonIntegerInitial(_)
        ));
    }

    #[test]
    fn pipeline_structural_predicates() {
        for name in ["fibonacci", "factorial", "nsquared", "power_tower", "two_pow_nsq"] {
            let s = crate::engines::builtin_by_name(name).unwrap();
            let (t, meta) = pipeline(&s).unwrap();
            assert!(meta.output_integral, "{name}");
            assert!(t.init().iter().all(|v| v.is_integer()), "{name}");
            assert!(t.rules().iter().all(|r| r.has_integer_coeffs()), "{name}");
            for rule in t.rules() {
                for (m, _) in rule.terms() {
                    assert_eq!(m.total_degree(), meta.d, "{name}");
                }
            }
            assert!(meta.d >= 2);
        }
    }

    #[test]
    fn pipeline_preserves_outputs_up_to_scaling() {
        // a = 2 case: u' = u*v/2, v' = 4v gives the integer sequence
        // 2^(n(n-1)) with a fractional coefficient
        let s = PolySystem::new(
            vec![x(2, 0).mul(&x(2, 1)).scale(&rat(1, 2)), x(2, 1).scale(&int(4))],
            vec![int(1), int(2)],
            0,
        )
        .unwrap();
        let (t, meta) = pipeline(&s).unwrap();
        assert_eq!(meta.a, BigInt::from(2));
        assert_eq!(meta.d, 2);
        // scaled output at n equals a^((d^n-1)/(d-1)) * original output
        for n in 0..=8u32 {
            let factor = rat_pow(&Rat::from(meta.a.clone()), (1u32 << n) - 1);
            assert_eq!(
                t.eval_output(n as u64).unwrap(),
                s.eval_output(n as u64).unwrap() * factor
            );
        }
    }

    #[test]
    fn pipeline_on_random_small_systems_never_fails() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(0x9e3779b9);
        for _ in 0..30 {
            let k = rng.random_range(1..=3usize);
            let rules: Vec<MultiPoly> = (0..k)
                .map(|_| {
                    let monos = crate::poly::monomials_up_to_degree(k, 2);
                    MultiPoly::from_terms(
                        k,
                        monos.into_iter().filter_map(|m| {
                            if rng.random_bool(0.4) {
                                let num = rng.random_range(-3i64..=3);
                                let den = rng.random_range(1i64..=3);
                                Some((m, rat(num, den)))
                            } else {
                                None
                            }
                        }),
                    )
                })
                .collect();
            let mut init: Vec<Rat> = (0..k)
                .map(|_| rat(rng.random_range(-4i64..=4), rng.random_range(1i64..=4)))
                .collect();
            init[0] = int(rng.random_range(-4i64..=4)); // integral output initial
            let s = PolySystem::new(rules, init, 0).unwrap();
            let (t, meta) = pipeline(&s).unwrap();
            // output preserved exactly by the first two stages, and up to the
            // known scalar overall
            for n in 0..=6u32 {
                let e = if meta.d == 1 {
                    n
                } else {
                    (meta.d.pow(n) - 1) / (meta.d - 1)
                };
                let factor = rat_pow(&Rat::from(meta.a.clone()), e);
                assert_eq!(
                    t.eval_output(n as u64).unwrap(),
                    s.eval_output(n as u64).unwrap() * factor
                );
            }
        }
    }
}
