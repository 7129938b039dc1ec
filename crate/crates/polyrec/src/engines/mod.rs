//! Sequence definitions and exact evaluators: polynomial systems, single
//! linear/polynomial recurrences, rational-function systems, and closed-form
//! oracle sequences.
//!
//! All definitions are immutable; evaluation either streams states through an
//! iterator (constant memory per step) or collects a prefix. Values can grow
//! doubly exponentially, so stepping is guarded by a configurable bit-size
//! ceiling that fails with a typed error instead of exhausting memory.

mod builtins;
mod oracle;

pub use builtins::{builtin, builtin_by_name, builtin_names, r_pow_q, Builtin};
pub use oracle::OracleSequence;

use num_traits::Zero;
use thiserror::Error;

use crate::poly::{MultiPoly, PolyError, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("value exceeded the {max_bits}-bit budget at step {step}")]
    Overflow { step: u64, max_bits: u64 },
    #[error("denominator of rule {rule} vanished at step {step}")]
    DenominatorVanished { step: u64, rule: usize },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("base of an exponential sequence must be nonzero")]
    ZeroBase,
    #[error("exponent polynomial is not integer-valued: {0}")]
    NonIntegerExponent(String),
    #[error("unknown builtin sequence `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl EngineError {
    pub fn name(&self) -> &'static str {
        match self {
            EngineError::Overflow { .. } => "Overflow",
            EngineError::DenominatorVanished { .. } => "DenominatorVanished",
            EngineError::InvalidSystem(_) => "InvalidSystem",
            EngineError::ZeroBase => "ZeroBase",
            EngineError::NonIntegerExponent(_) => "NonIntegerExponent",
            EngineError::UnknownBuiltin(_) => "UnknownBuiltin",
            EngineError::Poly(e) => e.name(),
        }
    }
}

/// Guard on intermediate value size during iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalLimits {
    /// Maximum bit length of any numerator or denominator (default `2^20`).
    pub max_bits: u64,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits { max_bits: 1 << 20 }
    }
}

impl EvalLimits {
    pub fn unlimited() -> Self {
        EvalLimits { max_bits: u64::MAX }
    }

    fn check(&self, v: &Rat, step: u64) -> Result<(), EngineError> {
        if v.numer().bits() > self.max_bits || v.denom().bits() > self.max_bits {
            return Err(EngineError::Overflow {
                step,
                max_bits: self.max_bits,
            });
        }
        Ok(())
    }
}

/// System of `k` mutually recursive sequences with polynomial step rules:
/// `state[i]_{n+1} = rules[i](state_n)`, output read at `output`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    rules: Vec<MultiPoly>,
    init: Vec<Rat>,
    output: usize,
}

impl PolySystem {
    pub fn new(rules: Vec<MultiPoly>, init: Vec<Rat>, output: usize) -> Result<Self, EngineError> {
        let k = rules.len();
        if k == 0 {
            return Err(EngineError::InvalidSystem("no sequences".into()));
        }
        if init.len() != k {
            return Err(EngineError::InvalidSystem(format!(
                "{} rules but {} initial values",
                k,
                init.len()
            )));
        }
        if let Some(i) = rules.iter().position(|r| r.varcount() != k) {
            return Err(EngineError::InvalidSystem(format!(
                "rule {} has {} variables, expected {}",
                i,
                rules[i].varcount(),
                k
            )));
        }
        if output >= k {
            return Err(EngineError::InvalidSystem(format!(
                "output index {output} out of range {k}"
            )));
        }
        Ok(PolySystem {
            rules,
            init,
            output,
        })
    }

    /// Number of sequences.
    pub fn dim(&self) -> usize {
        self.rules.len()
    }

    pub fn rules(&self) -> &[MultiPoly] {
        &self.rules
    }

    pub fn init(&self) -> &[Rat] {
        &self.init
    }

    pub fn output_index(&self) -> usize {
        self.output
    }

    pub fn with_output(mut self, output: usize) -> Result<Self, EngineError> {
        if output >= self.dim() {
            return Err(EngineError::InvalidSystem(format!(
                "output index {output} out of range {}",
                self.dim()
            )));
        }
        self.output = output;
        Ok(self)
    }

    /// Iterator over states `u_0, u_1, ...` with the default size guard.
    pub fn states(&self) -> StateIter<'_> {
        self.states_with(EvalLimits::default())
    }

    pub fn states_with(&self, limits: EvalLimits) -> StateIter<'_> {
        StateIter {
            sys: self,
            pending: Some(Ok(self.init.clone())),
            step: 0,
            limits,
        }
    }

    pub fn eval_state(&self, n: u64) -> Result<Vec<Rat>, EngineError> {
        self.eval_state_with(n, EvalLimits::default())
    }

    pub fn eval_state_with(&self, n: u64, limits: EvalLimits) -> Result<Vec<Rat>, EngineError> {
        let mut iter = self.states_with(limits);
        let mut last = None;
        for _ in 0..=n {
            match iter.next() {
                Some(Ok(state)) => last = Some(state),
                Some(Err(e)) => return Err(e),
                None => unreachable!("iterator fuses only after yielding an error"),
            }
        }
        Ok(last.expect("at least one state"))
    }

    pub fn eval_output(&self, n: u64) -> Result<Rat, EngineError> {
        Ok(self.eval_state(n)?.swap_remove(self.output))
    }

    /// Output values `u_0 ..= u_n`.
    pub fn output_prefix(&self, n: u64) -> Result<Vec<Rat>, EngineError> {
        self.output_prefix_with(n, EvalLimits::default())
    }

    pub fn output_prefix_with(&self, n: u64, limits: EvalLimits) -> Result<Vec<Rat>, EngineError> {
        self.states_with(limits)
            .take(n as usize + 1)
            .map(|s| s.map(|mut st| st.swap_remove(self.output)))
            .collect()
    }
}

/// Iterator over system states; yields `Err` once and then fuses if the size
/// guard trips, otherwise runs forever.
pub struct StateIter<'a> {
    sys: &'a PolySystem,
    pending: Option<Result<Vec<Rat>, EngineError>>,
    step: u64,
    limits: EvalLimits,
}

impl StateIter<'_> {
    /// Conservative upper bound on the bit size a rule can produce from the
    /// given state, so that pathological growth is rejected before a huge
    /// value is materialized. Cancellation can make the true size much
    /// smaller; the 4x slack plus the exact post-check keep that from
    /// mattering for sane rules.
    fn growth_estimate(rule: &MultiPoly, state_bits: &[u64]) -> u64 {
        let mut worst: u64 = 0;
        for (m, c) in rule.terms() {
            let mut bits = c.numer().bits().max(c.denom().bits());
            for (i, &e) in m.exponents().iter().enumerate() {
                bits = bits.saturating_add((e as u64).saturating_mul(state_bits[i]));
            }
            worst = worst.max(bits);
        }
        worst.saturating_add(64)
    }
}

impl Iterator for StateIter<'_> {
    type Item = Result<Vec<Rat>, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.pending.take()? {
            Err(e) => Some(Err(e)),
            Ok(state) => {
                let state_bits: Vec<u64> = state
                    .iter()
                    .map(|v| v.numer().bits().max(v.denom().bits()))
                    .collect();
                let next_step = self.step + 1;
                let mut next = Vec::with_capacity(state.len());
                let mut fail = None;
                for rule in &self.sys.rules {
                    if Self::growth_estimate(rule, &state_bits)
                        > self.limits.max_bits.saturating_mul(4)
                    {
                        fail = Some(EngineError::Overflow {
                            step: next_step,
                            max_bits: self.limits.max_bits,
                        });
                        break;
                    }
                    let v = rule
                        .evaluate(&state)
                        .expect("system invariant: rule arity matches state");
                    if let Err(e) = self.limits.check(&v, next_step) {
                        fail = Some(e);
                        break;
                    }
                    next.push(v);
                }
                self.step = next_step;
                self.pending = Some(match fail {
                    Some(e) => Err(e),
                    None => Ok(next),
                });
                Some(Ok(state))
            }
        }
    }
}

/// Single linear recurrence of order `k`:
/// `u_{n+k} = coeffs[0]*u_n + ... + coeffs[k-1]*u_{n+k-1} (+ constant)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRecurrence {
    coeffs: Vec<Rat>,
    init: Vec<Rat>,
    constant: Option<Rat>,
}

impl LinearRecurrence {
    pub fn new(
        coeffs: Vec<Rat>,
        init: Vec<Rat>,
        constant: Option<Rat>,
    ) -> Result<Self, EngineError> {
        if coeffs.is_empty() {
            return Err(EngineError::InvalidSystem("order must be at least 1".into()));
        }
        if coeffs.len() != init.len() {
            return Err(EngineError::InvalidSystem(format!(
                "order {} but {} initial values",
                coeffs.len(),
                init.len()
            )));
        }
        Ok(LinearRecurrence {
            coeffs,
            init,
            constant: constant.filter(|c| !c.is_zero()),
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn init(&self) -> &[Rat] {
        &self.init
    }

    pub fn constant(&self) -> Option<&Rat> {
        self.constant.as_ref()
    }

    pub fn eval(&self, n: u64) -> Rat {
        self.prefix(n).pop().expect("nonempty prefix")
    }

    /// Values `u_0 ..= u_n` by sliding-window application.
    pub fn prefix(&self, n: u64) -> Vec<Rat> {
        let k = self.order();
        let mut vals: Vec<Rat> = self.init.iter().take(n as usize + 1).cloned().collect();
        while vals.len() <= n as usize {
            let m = vals.len();
            let mut next = self
                .constant
                .clone()
                .unwrap_or_else(|| Rat::from(num_bigint::BigInt::from(0)));
            for (i, c) in self.coeffs.iter().enumerate() {
                next += c * &vals[m - k + i];
            }
            vals.push(next);
        }
        vals
    }
}

/// Single polynomial recurrence of order `k`:
/// `u_{n+k} = rule(u_n, ..., u_{n+k-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleRecurrence {
    rule: MultiPoly,
    init: Vec<Rat>,
}

impl SimpleRecurrence {
    pub fn new(rule: MultiPoly, init: Vec<Rat>) -> Result<Self, EngineError> {
        if init.is_empty() {
            return Err(EngineError::InvalidSystem("order must be at least 1".into()));
        }
        if rule.varcount() != init.len() {
            return Err(EngineError::InvalidSystem(format!(
                "rule has {} variables but {} initial values given",
                rule.varcount(),
                init.len()
            )));
        }
        Ok(SimpleRecurrence { rule, init })
    }

    pub fn order(&self) -> usize {
        self.init.len()
    }

    pub fn rule(&self) -> &MultiPoly {
        &self.rule
    }

    pub fn init(&self) -> &[Rat] {
        &self.init
    }

    pub fn eval(&self, n: u64) -> Rat {
        self.prefix(n).pop().expect("nonempty prefix")
    }

    pub fn prefix(&self, n: u64) -> Vec<Rat> {
        let k = self.order();
        let mut vals: Vec<Rat> = self.init.iter().take(n as usize + 1).cloned().collect();
        while vals.len() <= n as usize {
            let m = vals.len();
            let window = &vals[m - k..m];
            let next = self
                .rule
                .evaluate(window)
                .expect("recurrence invariant: rule arity matches window");
            vals.push(next);
        }
        vals
    }
}

/// System with rational-function step rules `numer_i / denom_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSystem {
    rules: Vec<(MultiPoly, MultiPoly)>,
    init: Vec<Rat>,
    output: usize,
}

impl RationalSystem {
    pub fn new(
        rules: Vec<(MultiPoly, MultiPoly)>,
        init: Vec<Rat>,
        output: usize,
    ) -> Result<Self, EngineError> {
        let k = rules.len();
        if k == 0 {
            return Err(EngineError::InvalidSystem("no sequences".into()));
        }
        if init.len() != k || output >= k {
            return Err(EngineError::InvalidSystem(
                "initial values or output index do not match the rule count".into(),
            ));
        }
        for (i, (num, den)) in rules.iter().enumerate() {
            if num.varcount() != k || den.varcount() != k {
                return Err(EngineError::InvalidSystem(format!(
                    "rule {i} arity does not match the system"
                )));
            }
            if den.is_zero() {
                return Err(EngineError::InvalidSystem(format!(
                    "rule {i} has a zero denominator polynomial"
                )));
            }
        }
        Ok(RationalSystem {
            rules,
            init,
            output,
        })
    }

    pub fn dim(&self) -> usize {
        self.rules.len()
    }

    pub fn rules(&self) -> &[(MultiPoly, MultiPoly)] {
        &self.rules
    }

    pub fn init(&self) -> &[Rat] {
        &self.init
    }

    pub fn output_index(&self) -> usize {
        self.output
    }

    pub fn eval_state(&self, n: u64) -> Result<Vec<Rat>, EngineError> {
        let mut state = self.init.clone();
        for step in 0..n {
            let mut next = Vec::with_capacity(state.len());
            for (i, (num, den)) in self.rules.iter().enumerate() {
                let d = den.evaluate(&state).expect("arity checked at construction");
                if d.is_zero() {
                    return Err(EngineError::DenominatorVanished { step, rule: i });
                }
                let v = num.evaluate(&state).expect("arity checked at construction");
                next.push(v / d);
            }
            state = next;
        }
        Ok(state)
    }

    pub fn eval_output(&self, n: u64) -> Result<Rat, EngineError> {
        Ok(self.eval_state(n)?.swap_remove(self.output))
    }

    pub fn output_prefix(&self, n: u64) -> Result<Vec<Rat>, EngineError> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut state = self.init.clone();
        out.push(state[self.output].clone());
        for step in 0..n {
            let mut next = Vec::with_capacity(state.len());
            for (i, (num, den)) in self.rules.iter().enumerate() {
                let d = den.evaluate(&state).expect("arity checked at construction");
                if d.is_zero() {
                    return Err(EngineError::DenominatorVanished { step, rule: i });
                }
                let v = num.evaluate(&state).expect("arity checked at construction");
                next.push(v / d);
            }
            state = next;
            out.push(state[self.output].clone());
        }
        Ok(out)
    }
}

/// A source of exact sequence values. Implemented by the evaluation engines
/// and by closed-form oracles; empirical searches are generic over it.
pub trait SequenceOracle {
    fn value(&self, n: u64) -> Result<Rat, EngineError>;

    /// Values `u_0 ..= u_{len-1}`. Implementations override this when
    /// incremental evaluation is cheaper than repeated `value` calls.
    fn prefix(&self, len: u64) -> Result<Vec<Rat>, EngineError> {
        (0..len).map(|n| self.value(n)).collect()
    }
}

impl SequenceOracle for PolySystem {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        self.eval_output(n)
    }

    fn prefix(&self, len: u64) -> Result<Vec<Rat>, EngineError> {
        if len == 0 {
            return Ok(vec![]);
        }
        self.output_prefix(len - 1)
    }
}

impl SequenceOracle for RationalSystem {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        self.eval_output(n)
    }

    fn prefix(&self, len: u64) -> Result<Vec<Rat>, EngineError> {
        if len == 0 {
            return Ok(vec![]);
        }
        self.output_prefix(len - 1)
    }
}

impl SequenceOracle for LinearRecurrence {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        Ok(self.eval(n))
    }

    fn prefix(&self, len: u64) -> Result<Vec<Rat>, EngineError> {
        if len == 0 {
            return Ok(vec![]);
        }
        Ok(LinearRecurrence::prefix(self, len - 1))
    }
}

impl SequenceOracle for SimpleRecurrence {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        Ok(self.eval(n))
    }

    fn prefix(&self, len: u64) -> Result<Vec<Rat>, EngineError> {
        if len == 0 {
            return Ok(vec![]);
        }
        Ok(SimpleRecurrence::prefix(self, len - 1))
    }
}

#[cfg(test)]
mod tests;
