//! Reduction of integer systems modulo a prime, exact cycle detection on the
//! finite state space, reconstruction of output residues for systems with
//! rational data, and Catalan divisibility blocks.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::engines::{EngineError, OracleSequence, PolySystem};
use crate::modarith::{invmod, is_prime_u64, mulmod, powmod};
use crate::normalize::{pipeline, NormalizeError, ScalingMeta};
use crate::poly::{ModPoly, PolyError, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModularError {
    #[error("{0} is not prime")]
    NonPrimeModulus(u64),
    #[error("prime {p} does not exceed the coefficient-clearing scalar {a}")]
    PrimeTooSmall { p: u64, a: BigInt },
    #[error("output initial value is not an integer; residues are undefined")]
    NonIntegerOutputInitial,
    #[error("value at index {n} has a denominator divisible by the modulus")]
    DenominatorDivisibleByPrime { n: u64 },
    #[error("block analysis requires a prime greater than 3, got {0}")]
    BlockPrimeRange(u64),
    #[error("the state report is not periodic")]
    NotPeriodic,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl ModularError {
    pub fn name(&self) -> &'static str {
        match self {
            ModularError::NonPrimeModulus(_) => "NonPrimeModulus",
            ModularError::PrimeTooSmall { .. } => "PrimeTooSmall",
            ModularError::NonIntegerOutputInitial => "NonIntegerOutputInitial",
            ModularError::DenominatorDivisibleByPrime { .. } => "DenominatorDivisibleByPrime",
            ModularError::BlockPrimeRange(_) => "BlockPrimeRange",
            ModularError::NotPeriodic => "NotPeriodic",
            ModularError::Poly(e) => e.name(),
            ModularError::Normalize(e) => e.name(),
            ModularError::Engine(e) => e.name(),
        }
    }
}

/// A polynomial system reduced modulo a prime: rules over `F_p` and a state
/// vector in `{0, ..., p-1}^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModSystem {
    p: u64,
    rules: Vec<ModPoly>,
    init: Vec<u64>,
    output: usize,
}

impl ModSystem {
    /// Reduce a system with integer coefficients and integer initial values.
    pub fn from_system(s: &PolySystem, p: u64) -> Result<Self, ModularError> {
        if !is_prime_u64(p) {
            return Err(ModularError::NonPrimeModulus(p));
        }
        let rules: Vec<ModPoly> = s
            .rules()
            .iter()
            .map(|r| r.reduce_mod(p))
            .collect::<Result<_, _>>()?;
        let pb = BigInt::from(p);
        let init: Vec<u64> = s
            .init()
            .iter()
            .map(|v| {
                if !v.is_integer() {
                    return Err(ModularError::Poly(PolyError::NonIntegerCoefficient(
                        v.to_string(),
                    )));
                }
                Ok((&v.numer().mod_floor(&pb)).try_into().expect("fits u64"))
            })
            .collect::<Result<_, _>>()?;
        Ok(ModSystem {
            p,
            rules,
            init,
            output: s.output_index(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.rules.len()
    }

    pub fn init(&self) -> &[u64] {
        &self.init
    }

    pub fn output_index(&self) -> usize {
        self.output
    }

    pub fn step(&self, state: &[u64]) -> Vec<u64> {
        self.rules.iter().map(|r| r.eval(state)).collect()
    }

    /// Infinite iterator over state vectors starting at the initial state.
    pub fn states(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let mut state = Some(self.init.clone());
        std::iter::from_fn(move || {
            let cur = state.take()?;
            state = Some(self.step(&cur));
            Some(cur)
        })
    }

    /// Output residues `r_0, r_1, ...`.
    pub fn outputs(&self) -> impl Iterator<Item = u64> + '_ {
        self.states().map(move |s| s[self.output])
    }
}

/// Result of cycle detection: either exact minimal preperiod and period of
/// the state sequence, or the examined-step count when no repeat showed up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodicityReport {
    Periodic { preperiod: u64, period: u64 },
    CutoffExhausted { steps: u64 },
}

impl PeriodicityReport {
    pub fn is_periodic(&self) -> bool {
        matches!(self, PeriodicityReport::Periodic { .. })
    }
}

/// Options for `detect_period_with`. The hash-table walk stores every
/// visited state; above `table_state_limit` states it switches to the
/// constant-memory two-pointer search.
#[derive(Debug, Clone, Copy)]
pub struct DetectOpts {
    pub table_state_limit: u64,
}

impl Default for DetectOpts {
    fn default() -> Self {
        DetectOpts {
            table_state_limit: 1 << 22,
        }
    }
}

/// Packed state vector used as a hash key: a single machine word when `p^k`
/// fits in one, otherwise fixed-width little-endian bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum StateKey {
    Word(u64),
    Bytes(Box<[u8]>),
}

fn pack_word(p: u64, k: usize) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(p as u128);
        if acc > u64::MAX as u128 {
            return false;
        }
    }
    true
}

fn packer(p: u64, k: usize) -> impl Fn(&[u64]) -> StateKey {
    let word = pack_word(p, k);
    let width = ((64 - (p - 1).leading_zeros()) as usize).div_ceil(8).max(1);
    move |state: &[u64]| {
        if word {
            StateKey::Word(state.iter().fold(0u64, |acc, &s| acc * p + s))
        } else {
            let mut bytes = Vec::with_capacity(state.len() * width);
            for &s in state {
                bytes.extend_from_slice(&s.to_le_bytes()[..width]);
            }
            StateKey::Bytes(bytes.into_boxed_slice())
        }
    }
}

/// Exact minimal `(preperiod, period)` of the state sequence, provided the
/// first repeated state occurs within `cutoff` steps (guaranteed when
/// `cutoff >= p^k + 1`); otherwise `CutoffExhausted`.
pub fn detect_period(m: &ModSystem, cutoff: u64) -> PeriodicityReport {
    detect_period_with(m, cutoff, DetectOpts::default())
}

pub fn detect_period_with(m: &ModSystem, cutoff: u64, opts: DetectOpts) -> PeriodicityReport {
    if cutoff.min(u64::MAX - 1) < opts.table_state_limit {
        detect_period_table(m, cutoff)
    } else {
        detect_period_brent(m, cutoff)
    }
}

fn detect_period_table(m: &ModSystem, cutoff: u64) -> PeriodicityReport {
    let pack = packer(m.p, m.dim());
    let mut seen: HashMap<StateKey, u64> = HashMap::new();
    let mut state = m.init.clone();
    for step in 0..=cutoff {
        match seen.entry(pack(&state)) {
            std::collections::hash_map::Entry::Occupied(e) => {
                let first = *e.get();
                return PeriodicityReport::Periodic {
                    preperiod: first,
                    period: step - first,
                };
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(step);
            }
        }
        state = m.step(&state);
    }
    PeriodicityReport::CutoffExhausted { steps: cutoff }
}

/// Constant-memory cycle search. Finds the minimal cycle length with
/// power-of-two windows, then the minimal preperiod with two aligned
/// pointers. Reported results are normalized to the same contract as the
/// table walk: a repeat must occur within `cutoff` steps.
fn detect_period_brent(m: &ModSystem, cutoff: u64) -> PeriodicityReport {
    let budget = cutoff.saturating_mul(3).saturating_add(4);
    let mut evals: u64 = 0;

    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    let mut tortoise = m.init.clone();
    let mut hare = m.step(&tortoise);
    evals += 1;
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power = power.saturating_mul(2);
            lam = 0;
        }
        hare = m.step(&hare);
        lam += 1;
        evals += 1;
        if evals > budget {
            return PeriodicityReport::CutoffExhausted { steps: cutoff };
        }
    }
    if lam > cutoff {
        return PeriodicityReport::CutoffExhausted { steps: cutoff };
    }

    let mut tortoise = m.init.clone();
    let mut hare = m.init.clone();
    for _ in 0..lam {
        hare = m.step(&hare);
    }
    let mut mu: u64 = 0;
    while tortoise != hare {
        tortoise = m.step(&tortoise);
        hare = m.step(&hare);
        mu += 1;
        if mu + lam > cutoff {
            return PeriodicityReport::CutoffExhausted { steps: cutoff };
        }
    }
    PeriodicityReport::Periodic {
        preperiod: mu,
        period: lam,
    }
}

/// Minimal `(preperiod, period)` of one projected coordinate, given a
/// periodic state report. The projected period always divides the state
/// period.
pub fn project_period(
    m: &ModSystem,
    report: &PeriodicityReport,
    output: usize,
) -> Result<PeriodicityReport, ModularError> {
    let PeriodicityReport::Periodic { preperiod, period } = *report else {
        return Err(ModularError::NotPeriodic);
    };
    let needed = (preperiod + 2 * period) as usize;
    let residues: Vec<u64> = m.states().take(needed).map(|s| s[output]).collect();

    let mut divisors: Vec<u64> = (1..=period).filter(|d| period % d == 0).collect();
    divisors.sort_unstable();
    for d in divisors {
        // A candidate divisor is the projected period iff it matches on one
        // full state period beyond the preperiod.
        let ok = (preperiod..preperiod + period)
            .all(|n| residues[n as usize] == residues[(n + d) as usize]);
        if !ok {
            continue;
        }
        let mut start = preperiod;
        while start > 0 && residues[(start - 1) as usize] == residues[(start - 1 + d) as usize] {
            start -= 1;
        }
        return Ok(PeriodicityReport::Periodic {
            preperiod: start,
            period: d,
        });
    }
    unreachable!("the state period itself always validates")
}

/// Residue stream for a system with rational data. The system is first made
/// integer-initial, homogeneous and integer-coefficient; the scaled system
/// is iterated mod `p` and each output residue is multiplied by the inverse
/// scaling factor `b^((d^n - 1)/(d - 1))`, maintained by the auxiliary
/// recurrence `b_{n+1} = b * b_n^d`.
pub struct ResidueReconstruction {
    meta: ScalingMeta,
    p: u64,
    system: ModSystem,
    state: Vec<u64>,
    bfactor: u64,
    b: u64,
}

impl ResidueReconstruction {
    pub fn new(original: &PolySystem, p: u64) -> Result<Self, ModularError> {
        if !is_prime_u64(p) {
            return Err(ModularError::NonPrimeModulus(p));
        }
        if !original.init()[original.output_index()].is_integer() {
            return Err(ModularError::NonIntegerOutputInitial);
        }
        let (scaled, meta) = pipeline(original)?;
        debug_assert!(meta.output_integral);
        if BigInt::from(p) <= meta.a {
            return Err(ModularError::PrimeTooSmall {
                p,
                a: meta.a.clone(),
            });
        }
        let system = ModSystem::from_system(&scaled, p)?;
        let a_mod: u64 = (&meta.a.mod_floor(&BigInt::from(p)))
            .try_into()
            .expect("fits u64");
        let b = invmod(a_mod, p).expect("p > a >= 1 makes a invertible");
        let state = system.init().to_vec();
        Ok(ResidueReconstruction {
            meta,
            p,
            system,
            state,
            bfactor: 1,
            b,
        })
    }

    pub fn meta(&self) -> &ScalingMeta {
        &self.meta
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Iterator for ResidueReconstruction {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let r = mulmod(self.bfactor, self.state[self.system.output_index()], self.p);
        self.state = self.system.step(&self.state);
        self.bfactor = mulmod(
            self.b,
            powmod(self.bfactor, self.meta.d as u64, self.p),
            self.p,
        );
        Some(r)
    }
}

/// Convenience wrapper: the first `count` output residues of `original`
/// modulo `p`.
pub fn reconstruct_residues(
    original: &PolySystem,
    p: u64,
    count: usize,
) -> Result<Vec<u64>, ModularError> {
    Ok(ResidueReconstruction::new(original, p)?.take(count).collect())
}

/// Verdict of a bounded periodicity scan of a residue prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanVerdict {
    /// `(preperiod, period)` validated against the entire prefix.
    PeriodFound { preperiod: u64, period: u64 },
    /// No candidate up to `max_period` validated. Not a proof of
    /// aperiodicity, only a bounded semi-decision.
    NoneFound { max_period: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModScanReport {
    pub p: u64,
    pub residues: Vec<u64>,
    pub verdict: ScanVerdict,
}

/// Residues `u_n mod p` for `n < window` of a closed-form oracle, computed
/// without materializing astronomically large exact values where a modular
/// shortcut exists.
pub fn oracle_residues(
    o: &OracleSequence,
    p: u64,
    window: u64,
) -> Result<Vec<u64>, ModularError> {
    if !is_prime_u64(p) {
        return Err(ModularError::NonPrimeModulus(p));
    }
    let out = match o {
        OracleSequence::NN => (0..window).map(|n| powmod(n % p, n, p)).collect(),
        OracleSequence::Factorial => {
            let mut acc = 1u64;
            (0..window)
                .map(|n| {
                    if n > 0 {
                        acc = mulmod(acc, n % p, p);
                    }
                    acc
                })
                .collect()
        }
        OracleSequence::PowerTower => (0..window)
            .map(|n| {
                if p == 2 {
                    0
                } else {
                    // 2^(2^n) mod p = 2^(2^n mod (p-1)) mod p
                    powmod(2, powmod(2, n, p - 1), p)
                }
            })
            .collect(),
        OracleSequence::Catalan => {
            let pb = BigInt::from(p);
            let mut c = BigInt::one();
            let mut out = Vec::with_capacity(window as usize);
            for n in 0..window {
                if n > 0 {
                    c = c * (4 * n - 2) / (n + 1);
                }
                out.push((&c.mod_floor(&pb)).try_into().expect("fits u64"));
            }
            out
        }
        OracleSequence::Custom { .. } => {
            let mut out = Vec::with_capacity(window as usize);
            for n in 0..window {
                out.push(rat_mod(&o.eval(n), p).ok_or(
                    ModularError::DenominatorDivisibleByPrime { n },
                )?);
            }
            out
        }
    };
    Ok(out)
}

/// Residue of a rational with denominator coprime to `p`.
fn rat_mod(v: &Rat, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num: u64 = (&v.numer().mod_floor(&pb)).try_into().expect("fits u64");
    let den: u64 = (&v.denom().mod_floor(&pb)).try_into().expect("fits u64");
    Some(mulmod(num, invmod(den, p)?, p))
}

/// Best-effort periodicity scan of `u_n mod p` over `n < window`.
///
/// Candidate periods up to `window / 4` are tried in increasing order; a
/// candidate is accepted only if it validates over the entire prefix with at
/// least one full period of slack, and the minimal preperiod is reported.
pub fn oracle_mod_scan(
    o: &OracleSequence,
    p: u64,
    window: u64,
) -> Result<ModScanReport, ModularError> {
    let residues = oracle_residues(o, p, window)?;
    let verdict = scan_residues_for_period(&residues);
    Ok(ModScanReport {
        p,
        residues,
        verdict,
    })
}

pub(crate) fn scan_residues_for_period(residues: &[u64]) -> ScanVerdict {
    let window = residues.len() as u64;
    let max_period = (window / 4).max(1);
    for k in 1..=max_period {
        // smallest start index from which the tail is k-periodic
        let mut start = window - k;
        while start > 0 && residues[(start - 1) as usize] == residues[(start - 1 + k) as usize] {
            start -= 1;
        }
        // Accept only when the periodic tail covers at least half the window;
        // a short coincidental repeat at the end (e.g. inside one long zero
        // run) is not evidence of periodicity.
        if start <= window / 2 && start + 2 * k <= window {
            return ScanVerdict::PeriodFound {
                preperiod: start,
                period: k,
            };
        }
    }
    ScanVerdict::NoneFound { max_period }
}

/// One maximal run of Catalan numbers divisible by `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalanBlock {
    /// 1-based position of the block along the sequence.
    pub index: u64,
    /// Index of the first Catalan number in the block.
    pub start: u64,
    pub observed_len: u64,
    pub predicted_len: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockReport {
    pub p: u64,
    pub blocks: Vec<CatalanBlock>,
}

/// Predicted length of the `k`-th maximal divisible run:
/// `(p^(m+1) - 3) / 2` with `m` the largest integer such that
/// `((p+1)/2)^m` divides `k`.
pub fn predicted_block_len(p: u64, k: u64) -> u64 {
    let base = p.div_ceil(2);
    let mut m = 0u32;
    let mut kk = k;
    while kk.is_multiple_of(base) {
        m += 1;
        kk /= base;
    }
    let pw = (p as u128).pow(m + 1);
    ((pw - 3) / 2).try_into().expect("predicted length fits u64")
}

/// Stream Catalan residues mod `p` until `count` maximal zero-runs have
/// completed, pairing each observed length with the predicted one.
pub fn catalan_blocks(p: u64, count: u64) -> Result<BlockReport, ModularError> {
    if !is_prime_u64(p) {
        return Err(ModularError::NonPrimeModulus(p));
    }
    if p <= 3 {
        return Err(ModularError::BlockPrimeRange(p));
    }
    let mut blocks = Vec::with_capacity(count as usize);
    let mut c = BigInt::one();
    let pb = BigInt::from(p);
    let mut n: u64 = 0;
    let mut run_start: Option<u64> = None;
    while (blocks.len() as u64) < count {
        if n > 0 {
            c = c * (4 * n - 2) / (n + 1);
        }
        let divisible = c.mod_floor(&pb).is_zero();
        match (divisible, run_start) {
            (true, None) => run_start = Some(n),
            (false, Some(start)) => {
                let index = blocks.len() as u64 + 1;
                blocks.push(CatalanBlock {
                    index,
                    start,
                    observed_len: n - start,
                    predicted_len: predicted_block_len(p, index),
                });
                run_start = None;
            }
            _ => {}
        }
        n += 1;
    }
    Ok(BlockReport { p, blocks })
}
