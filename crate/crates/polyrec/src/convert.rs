//! Conversions between single recurrences and first-order systems.
//!
//! A single recurrence of order `k` becomes a `k`-sequence system by the
//! window shift `u^i_n = u_{n+i-1}`. Conversely, a system with affine rules
//! yields a single linear recurrence: the row vectors `e M^0, ..., e M^t`
//! must become linearly dependent by width `t = k`, and a kernel vector of
//! that family is exactly a linear form vanishing on every output window.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::engines::{EngineError, LinearRecurrence, PolySystem, SimpleRecurrence};
use crate::linalg::nullspace_basis;
use crate::poly::{Monomial, MultiPoly, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvertError {
    #[error("rule {0} has degree 2 or more; only affine systems convert to a single recurrence")]
    NonLinearRule(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl ConvertError {
    pub fn name(&self) -> &'static str {
        match self {
            ConvertError::NonLinearRule(_) => "NonLinearRule",
            ConvertError::Engine(e) => e.name(),
        }
    }
}

/// A linear form on a window `(u_n, ..., u_{n+w})` that vanishes on every
/// window of the sequence. Coefficients are indexed by offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelForm {
    coeffs: Vec<Rat>,
}

impl KernelForm {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        assert!(
            coeffs.iter().any(|c| !c.is_zero()),
            "kernel form must be nonzero"
        );
        KernelForm { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Largest index with a nonzero coefficient.
    pub fn leading_index(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .expect("kernel form is nonzero")
    }

    /// Apply the form to a window of values.
    pub fn apply(&self, window: &[Rat]) -> Rat {
        assert_eq!(window.len(), self.coeffs.len(), "window width mismatch");
        self.coeffs
            .iter()
            .zip(window)
            .map(|(c, v)| c * v)
            .fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Shift construction: a single linear recurrence of order `k` as a
/// `k`-sequence system. Rule `i` is `x_{i+1}` for `i < k`; the last rule is
/// the recurrence's form (plus its constant, when affine).
pub fn linear_to_system(r: &LinearRecurrence) -> PolySystem {
    let k = r.order();
    let mut rules: Vec<MultiPoly> = (1..k).map(|i| MultiPoly::var(k, i)).collect();
    let mut last = MultiPoly::zero(k);
    for (i, c) in r.coeffs().iter().enumerate() {
        last = last.add(&MultiPoly::var(k, i).scale(c));
    }
    if let Some(c) = r.constant() {
        last = last.add(&MultiPoly::constant(k, c.clone()));
    }
    rules.push(last);
    PolySystem::new(rules, r.init().to_vec(), 0).expect("shift system is well-formed")
}

/// Shift construction for a single polynomial recurrence.
pub fn simple_to_system(r: &SimpleRecurrence) -> PolySystem {
    let k = r.order();
    let mut rules: Vec<MultiPoly> = (1..k).map(|i| MultiPoly::var(k, i)).collect();
    rules.push(r.rule().clone());
    PolySystem::new(rules, r.init().to_vec(), 0).expect("shift system is well-formed")
}

/// Absorb constant terms into one appended constantly-1 sequence. Systems
/// without constant terms are returned unchanged; otherwise every constant
/// `c` becomes `c * x_{k+1}` and the new sequence keeps itself at 1.
pub fn affine_normalize(s: &PolySystem) -> PolySystem {
    let k = s.dim();
    let has_constants = s.rules().iter().any(|r| !r.constant_term().is_zero());
    if !has_constants {
        return s.clone();
    }
    let unit_old = Monomial::unit(k);
    let new_var = Monomial::var(k + 1, k);
    let mut rules: Vec<MultiPoly> = s
        .rules()
        .iter()
        .map(|r| {
            MultiPoly::from_terms(
                k + 1,
                r.terms().map(|(m, c)| {
                    if *m == unit_old {
                        (new_var.clone(), c.clone())
                    } else {
                        (m.pad(k + 1), c.clone())
                    }
                }),
            )
        })
        .collect();
    rules.push(MultiPoly::var(k + 1, k));
    let mut init = s.init().to_vec();
    init.push(Rat::one());
    PolySystem::new(rules, init, s.output_index()).expect("padded system is well-formed")
}

/// Extract a single linear recurrence from a system whose rules are affine.
///
/// The window width is grown from 1 upward and the first width admitting a
/// kernel is used, so the returned order is minimal for this construction
/// and never exceeds the system size. Ties among kernel vectors are broken
/// by smallest leading index, then lexicographically smallest normalized
/// coefficient vector.
pub fn linear_system_to_single(
    s: &PolySystem,
) -> Result<(LinearRecurrence, KernelForm), ConvertError> {
    if let Some(i) = s
        .rules()
        .iter()
        .position(|r| r.total_degree().is_some_and(|d| d >= 2))
    {
        return Err(ConvertError::NonLinearRule(i));
    }
    let s = affine_normalize(s);
    let k = s.dim();

    // Matrix of the linear step map, M[i][j] = coefficient of x_j in rule i.
    let m: Vec<Vec<Rat>> = s
        .rules()
        .iter()
        .map(|r| (0..k).map(|j| r.linear_coefficient(j)).collect())
        .collect();

    // Row vectors e M^0, e M^1, ..., where e selects the output coordinate.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(k + 1);
    let mut e = vec![Rat::zero(); k];
    e[s.output_index()] = Rat::one();
    rows.push(e);
    for _ in 0..k {
        let prev = rows.last().expect("at least one row");
        let next: Vec<Rat> = (0..k)
            .map(|j| {
                (0..k)
                    .map(|i| &prev[i] * &m[i][j])
                    .fold(Rat::zero(), |acc, x| acc + x)
            })
            .collect();
        rows.push(next);
    }

    for width in 1..=k {
        // Kernel vectors a with sum_i a_i * (e M^i) = 0, i = 0..=width.
        let cols = width + 1;
        let transposed: Vec<Vec<Rat>> = (0..k)
            .map(|j| (0..cols).map(|i| rows[i][j].clone()).collect())
            .collect();
        let basis = nullspace_basis(&transposed, cols);
        let Some(best) = basis.into_iter().min_by_key(|v| {
            let lead = v.iter().rposition(|c| !c.is_zero()).expect("nonzero");
            (lead, v.clone())
        }) else {
            continue;
        };
        let kernel = KernelForm::new(best);
        let t = kernel.leading_index();
        let lead = kernel.coeffs()[t].clone();
        let coeffs: Vec<Rat> = (0..t).map(|i| -(&kernel.coeffs()[i] / &lead)).collect();
        let init: Vec<Rat> = if t == 0 {
            // degenerate: the output is identically zero; represent it as the
            // order-1 recurrence u' = u starting from 0
            return Ok((
                LinearRecurrence::new(vec![Rat::one()], vec![Rat::zero()], None)
                    .map_err(ConvertError::Engine)?,
                kernel,
            ));
        } else {
            s.output_prefix((t - 1) as u64)
                .map_err(ConvertError::Engine)?
        };
        let rec = LinearRecurrence::new(coeffs, init, None).map_err(ConvertError::Engine)?;
        return Ok((rec, kernel));
    }
    unreachable!("a window of width k+1 always admits a kernel for a k-dimensional system")
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
    fn fibonacci_recurrence_to_system_shape() {
        let r = LinearRecurrence::new(vec![int(1), int(1)], vec![int(0), int(1)], None).unwrap();
        let s = linear_to_system(&r);
        assert_eq!(s.rules()[0], x(2, 1));
        assert_eq!(s.rules()[1], x(2, 0).add(&x(2, 1)));
        assert_eq!(s.init(), &[int(0), int(1)]);
        for n in 0..=20u64 {
            assert_eq!(s.eval_output(n).unwrap(), r.eval(n));
        }
    }

    #[test]
    fn order_three_squares_to_system() {
        let r = LinearRecurrence::new(
            vec![int(1), int(-3), int(3)],
            vec![int(0), int(1), int(4)],
            None,
        )
        .unwrap();
        let s = linear_to_system(&r);
        for n in 0..=50u64 {
            assert_eq!(s.eval_output(n).unwrap(), int((n * n) as i64));
        }
    }

    #[test]
    fn order_one_identity() {
        let r = LinearRecurrence::new(vec![int(1)], vec![rat(2, 3)], None).unwrap();
        let s = linear_to_system(&r);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.rules()[0], x(1, 0));
        for n in 0..10 {
            assert_eq!(s.eval_output(n).unwrap(), rat(2, 3));
        }
    }

    #[test]
    fn simple_recurrence_shift() {
        let rule = x(2, 0).mul(&x(2, 1)); // u_{n+2} = u_{n+1} u_n
        let r = SimpleRecurrence::new(rule, vec![int(1), int(2)]).unwrap();
        let s = simple_to_system(&r);
        for n in 0..=10u64 {
            assert_eq!(s.eval_output(n).unwrap(), r.eval(n));
        }
    }

    #[test]
    fn squares_system_gives_order_three() {
        let s = builtin(Builtin::NSquared);
        let (rec, kernel) = linear_system_to_single(&s).unwrap();
        assert!(rec.order() <= 3);
        for n in 0..=100u64 {
            assert_eq!(rec.eval(n), int((n * n) as i64));
        }
        // width 3 kernel direction: u_{n+3} - 3u_{n+2} + 3u_{n+1} - u_n
        assert_eq!(rec.order(), 3);
        assert_eq!(rec.coeffs(), &[int(1), int(-3), int(3)]);
        // and the kernel form annihilates output windows
        let prefix = s.output_prefix(203).unwrap();
        let w = kernel.coeffs().len();
        for n in 0..=200 {
            assert!(kernel.apply(&prefix[n..n + w]).is_zero());
        }
    }

    #[test]
    fn fibonacci_system_gives_order_two() {
        let s = builtin(Builtin::Fibonacci);
        let (rec, _) = linear_system_to_single(&s).unwrap();
        assert_eq!(rec.order(), 2);
        assert_eq!(rec.coeffs(), &[int(1), int(1)]);
        for n in 0..=30u64 {
            assert_eq!(rec.eval(n), s.eval_output(n).unwrap());
        }
    }

    #[test]
    fn constant_system_gives_order_one() {
        let s = PolySystem::new(vec![x(1, 0)], vec![rat(5, 7)], 0).unwrap();
        let (rec, _) = linear_system_to_single(&s).unwrap();
        assert_eq!(rec.order(), 1);
        assert_eq!(rec.coeffs(), &[int(1)]);
        assert_eq!(rec.eval(9), rat(5, 7));
    }

    #[test]
    fn nonlinear_rule_is_rejected() {
        let s = builtin(Builtin::Factorial);
        assert_eq!(
            linear_system_to_single(&s).unwrap_err(),
            ConvertError::NonLinearRule(0)
        );
    }

    #[test]
    fn affine_normalize_moves_constants() {
        // x2 + 1 becomes x2 + x3 with an appended constant sequence
        let s = PolySystem::new(
            vec![x(2, 0).mul(&x(2, 1)), x(2, 1).add(&MultiPoly::one(2))],
            vec![int(1), int(1)],
            0,
        )
        .unwrap();
        let t = affine_normalize(&s);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.rules()[1], x(3, 1).add(&x(3, 2)));
        assert_eq!(t.rules()[2], x(3, 2));
        assert_eq!(t.init()[2], int(1));
        for n in 0..=12u64 {
            assert_eq!(t.eval_output(n).unwrap(), s.eval_output(n).unwrap());
        }
    }

    #[test]
    fn affine_normalize_no_constants_is_identity() {
        let s = builtin(Builtin::Fibonacci);
        assert_eq!(affine_normalize(&s), s);
    }

    #[test]
    fn affine_normalize_all_constant_rules() {
        let s = PolySystem::new(vec![MultiPoly::constant(1, rat(3, 2))], vec![int(0)], 0).unwrap();
        let t = affine_normalize(&s);
        assert_eq!(t.dim(), 2);
        // the original rule is now a multiple of the new constant sequence
        assert_eq!(t.rules()[0], x(2, 1).scale(&rat(3, 2)));
        for n in 0..=8u64 {
            assert_eq!(t.eval_output(n).unwrap(), s.eval_output(n).unwrap());
        }
    }

    #[test]
    fn affine_system_with_constants_converts() {
        // u' = u + 1 (counter), v' = u
        let s = PolySystem::new(
            vec![x(2, 0).add(&MultiPoly::one(2)), x(2, 0)],
            vec![int(0), int(5)],
            0,
        )
        .unwrap();
        let (rec, _) = linear_system_to_single(&s).unwrap();
        for n in 0..=40u64 {
            assert_eq!(rec.eval(n), int(n as i64));
        }
    }

    #[test]
    fn round_trip_preserves_outputs() {
        let s = builtin(Builtin::NSquared);
        let (rec, _) = linear_system_to_single(&s).unwrap();
        let back = linear_to_system(&rec);
        for n in 0..=60u64 {
            assert_eq!(back.eval_output(n).unwrap(), s.eval_output(n).unwrap());
        }
    }
}
