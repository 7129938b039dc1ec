//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime against the stated budget. Expected values come from
//! independent closed forms computed inside this file, never from the code
//! paths under test.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use polyrec::cancelling::{self, Budget, SymbolicVerdict};
use polyrec::convert::{linear_system_to_single, linear_to_system};
use polyrec::dsl;
use polyrec::engines::{builtin_by_name, EvalLimits};
use polyrec::modular::{self, PeriodicityReport, ScanVerdict};
use polyrec::normalize;
use polyrec::poly::{monomials_up_to_degree, Monomial};
use polyrec::{
    builtin, Builtin, EngineError, MultiPoly, OracleSequence, PolySystem, Rat, RationalSystem,
};

fn criterion<F: FnOnce()>(number: u32, name: &str, budget: Duration, body: F) {
    let start = Instant::now();
    body();
    let elapsed = start.elapsed();
    println!(
        "criterion {number:02} ({name}): PASS in {:.2}s (budget {:.0}s)",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(
        elapsed <= budget,
        "criterion {number} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

fn int(v: i64) -> Rat {
    Rat::from(BigInt::from(v))
}

fn x(n: usize, i: usize) -> MultiPoly {
    MultiPoly::var(n, i)
}

/// Independent reference values, brute force only.
mod oracle {
    use super::*;

    pub fn fibonacci(n: u64) -> BigInt {
        let (mut a, mut b) = (BigInt::zero(), BigInt::one());
        for _ in 0..n {
            let next = &a + &b;
            a = b;
            b = next;
        }
        a
    }

    pub fn factorial(n: u64) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, k| acc * k)
    }

    pub fn catalan(n: u64) -> BigInt {
        // binomial(2n, n) / (n + 1) via an exact product
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for k in 0..n {
            num *= 2 * n - k;
            den *= k + 1;
        }
        num / den / (n + 1)
    }

    pub fn two_pow_nsq(n: u64) -> BigInt {
        BigInt::from(2).pow((n * n) as u32)
    }

    pub fn power_tower(n: u64) -> BigInt {
        BigInt::from(2).pow(1u32 << n)
    }

    /// 2^(2^n) mod p without the full value (odd p).
    pub fn power_tower_mod(n: u64, p: u64) -> u64 {
        polyrec::modarith::powmod(2, polyrec::modarith::powmod(2, n, p - 1), p)
    }

    pub fn nn(n: u64) -> BigInt {
        if n == 0 {
            BigInt::one()
        } else {
            BigInt::from(n).pow(n as u32)
        }
    }
}

fn to_u64_mod(v: &BigInt, p: u64) -> u64 {
    (&v.mod_floor(&BigInt::from(p))).try_into().expect("fits u64")
}

#[test]
fn criterion_01_builtin_fidelity() {
    criterion(1, "builtin fidelity", Duration::from_secs(1), || {
        let fib = builtin(Builtin::Fibonacci).output_prefix(30).unwrap();
        for (n, v) in fib.iter().enumerate() {
            assert_eq!(*v, Rat::from(oracle::fibonacci(n as u64)), "fib({n})");
        }
        let fact = builtin(Builtin::Factorial).output_prefix(20).unwrap();
        for (n, v) in fact.iter().enumerate() {
            assert_eq!(*v, Rat::from(oracle::factorial(n as u64)), "{n}!");
        }
        let squares = builtin(Builtin::NSquared).output_prefix(100).unwrap();
        for (n, v) in squares.iter().enumerate() {
            assert_eq!(*v, int((n * n) as i64), "{n}^2");
        }
        let tower = builtin(Builtin::PowerTower)
            .output_prefix_with(6, EvalLimits::unlimited())
            .unwrap();
        for (n, v) in tower.iter().enumerate() {
            assert_eq!(*v, Rat::from(oracle::power_tower(n as u64)), "2^(2^{n})");
        }
        let sq_exp = builtin(Builtin::TwoPowNSq).output_prefix(12).unwrap();
        for (n, v) in sq_exp.iter().enumerate() {
            assert_eq!(*v, Rat::from(oracle::two_pow_nsq(n as u64)), "2^({n}^2)");
        }
    });
}

#[test]
fn criterion_02_single_system_round_trip() {
    criterion(2, "single/system round trip", Duration::from_secs(5), || {
        let mut rng = StdRng::seed_from_u64(0x5eed_0002);
        for case in 0..100 {
            let k = rng.random_range(1..=4usize);
            let rules: Vec<MultiPoly> = (0..k)
                .map(|_| {
                    (0..k).fold(MultiPoly::zero(k), |acc, j| {
                        let e = rng.random_range(-5i64..=5);
                        acc.add(&x(k, j).scale(&int(e)))
                    })
                })
                .collect();
            let init: Vec<Rat> = (0..k).map(|_| int(rng.random_range(-5i64..=5))).collect();
            let system = PolySystem::new(rules, init, 0).unwrap();
            let (rec, _) = linear_system_to_single(&system).unwrap();
            let back = linear_to_system(&rec);
            let want = system.output_prefix(60).unwrap();
            let got = back.output_prefix(60).unwrap();
            assert_eq!(got, want, "case {case}");
        }
        // the three-sequence squares system collapses to an order <= 3
        // recurrence matching n^2
        let (rec, _) = linear_system_to_single(&builtin(Builtin::NSquared)).unwrap();
        assert!(rec.order() <= 3);
        let prefix = rec.prefix(100);
        for (n, v) in prefix.iter().enumerate() {
            assert_eq!(*v, int((n * n) as i64));
        }
    });
}

#[test]
fn criterion_03_modular_pipeline() {
    criterion(3, "modular reduction pipeline", Duration::from_secs(30), || {
        let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31];
        let names = ["fibonacci", "factorial", "nsquared", "power_tower", "two_pow_nsq"];
        for name in names {
            let system = builtin_by_name(name).unwrap();
            let (scaled, meta) = normalize::pipeline(&system).unwrap();
            // all-integer homogeneous output
            assert!(scaled.init().iter().all(|v| v.is_integer()), "{name}");
            assert!(scaled.rules().iter().all(|r| r.has_integer_coeffs()), "{name}");
            for rule in scaled.rules() {
                for (m, _) in rule.terms() {
                    assert_eq!(m.total_degree(), meta.d, "{name}");
                }
            }
            for p in primes {
                assert!(BigInt::from(p) > meta.a, "{name}: precondition p > a");
                let msys = modular::ModSystem::from_system(&scaled, p).unwrap();
                let cutoff = (p as u128)
                    .checked_pow(msys.dim() as u32)
                    .map(|v| (v + 1).min(u64::MAX as u128) as u64)
                    .unwrap_or(u64::MAX);
                let report = modular::detect_period(&msys, cutoff);
                let PeriodicityReport::Periodic { preperiod, period } = report else {
                    panic!("{name} mod {p}: no repeat within p^k + 1 steps");
                };
                assert!(preperiod + period <= cutoff);

                let residues = modular::reconstruct_residues(&system, p, 101).unwrap();
                for (n, r) in residues.iter().enumerate() {
                    let n64 = n as u64;
                    let want = match name {
                        "fibonacci" => to_u64_mod(&oracle::fibonacci(n64), p),
                        "factorial" => to_u64_mod(&oracle::factorial(n64), p),
                        "nsquared" => (n64 % p) * (n64 % p) % p,
                        "power_tower" => oracle::power_tower_mod(n64, p),
                        "two_pow_nsq" => to_u64_mod(&oracle::two_pow_nsq(n64), p),
                        _ => unreachable!(),
                    };
                    assert_eq!(*r, want, "{name} mod {p} at n = {n}");
                }
            }
        }
    });
}

#[test]
fn criterion_04_catalan_blocks_and_scan() {
    criterion(4, "Catalan blocks and scan", Duration::from_secs(30), || {
        for p in [5u64, 7, 11] {
            let report = modular::catalan_blocks(p, 5).unwrap();
            assert_eq!(report.blocks.len(), 5);
            for block in &report.blocks {
                assert_eq!(
                    block.observed_len, block.predicted_len,
                    "block {} mod {p}",
                    block.index
                );
            }
        }
        let scan = modular::oracle_mod_scan(&OracleSequence::Catalan, 5, 2000).unwrap();
        match scan.verdict {
            ScanVerdict::NoneFound { max_period } => assert!(max_period >= 200),
            ScanVerdict::PeriodFound { period, .. } => {
                assert!(period > 200, "a period {period} <= 200 was reported");
            }
        }
    });
}

#[test]
fn criterion_05_factorial_window_polynomial() {
    criterion(5, "factorial window polynomial", Duration::from_secs(5), || {
        let system = builtin(Builtin::Factorial);
        let q = dsl::parse_window_poly("x0*x2 - x1^2 - x0*x1").unwrap();
        let verdict = cancelling::verify_symbolic(&system, &q, &Budget::default()).unwrap();
        assert_eq!(verdict, SymbolicVerdict::Cancelling);

        let search = cancelling::find_cancelling_symbolic(&system, 2, &Budget::default()).unwrap();
        assert!(
            search.basis.iter().any(|b| b.is_scalar_multiple_of(&q)),
            "degree-2 basis must recover the polynomial up to scalar"
        );
    });
}

#[test]
fn criterion_06_no_simple_recurrence_for_factorial() {
    criterion(6, "no simple recurrence for n!", Duration::from_secs(60), || {
        let o = OracleSequence::Factorial;
        for k in 1..=3usize {
            for d in 1..=3u32 {
                let search = cancelling::find_simple_recurrence(&o, k, d, 50).unwrap();
                assert!(
                    search.certificates.is_empty(),
                    "unexpected survivor at order {k}, degree {d}"
                );
            }
        }
    });
}

#[test]
fn criterion_07_nn_empirical_emptiness() {
    criterion(7, "n^n empirical emptiness", Duration::from_secs(120), || {
        let o = OracleSequence::NN;
        let search = cancelling::find_cancelling_empirical(&o, 2, 3, 60).unwrap();
        assert!(
            search.conclusively_empty(),
            "no window-2 degree-3 polynomial cancels n^n"
        );
        let search = cancelling::find_cancelling_empirical(&o, 3, 2, 60).unwrap();
        assert!(
            search.conclusively_empty(),
            "no window-3 degree-2 polynomial cancels n^n"
        );
    });
}

/// Random nonzero integer window polynomial with k+1 <= 3 variables.
fn random_z(rng: &mut StdRng, max_terms: usize) -> MultiPoly {
    loop {
        let vars = rng.random_range(1..=3usize);
        let monos = monomials_up_to_degree(vars, 2);
        let terms = rng.random_range(1..=max_terms);
        let mut picked: Vec<(Monomial, Rat)> = Vec::new();
        for _ in 0..terms {
            let m = monos[rng.random_range(0..monos.len())].clone();
            let c = rng.random_range(-3i64..=3);
            picked.push((m, int(c)));
        }
        let z = MultiPoly::from_terms(vars, picked);
        if !z.is_zero() {
            return z;
        }
    }
}

#[test]
fn criterion_08_nn_refutation_machinery() {
    criterion(8, "n^n refutation machinery", Duration::from_secs(60), || {
        let mut rng = StdRng::seed_from_u64(0x5eed_0008);

        // decomposition identity, exactly, on 20 random polynomials
        for _ in 0..20 {
            let z = random_z(&mut rng, 4);
            let dec = cancelling::nn_decompose(&z).unwrap();
            let k = z.varcount() as u64 - 1;
            for n in 0..=15u64 {
                let window: Vec<Rat> =
                    (0..=k).map(|j| Rat::from(oracle::nn(n + j))).collect();
                let direct = z.evaluate(&window).unwrap();
                assert_eq!(direct, Rat::from(dec.window_sum(n).unwrap()));
            }
            // distinct monomials induce pairwise distinct base polynomials
            for i in 0..dec.len() {
                for j in i + 1..dec.len() {
                    assert_ne!(dec.pairs()[i].0, dec.pairs()[j].0);
                }
            }
        }

        // signed Vandermonde identity over 50 random instances
        for _ in 0..50 {
            let z = random_z(&mut rng, 3);
            let dec = cancelling::nn_decompose(&z).unwrap();
            let a = BigInt::from(rng.random_range(0i64..=20));
            assert!(cancelling::vandermonde_check(&dec, &a).unwrap());
        }

        // congruence cross-check at the witness index, 100 random cases
        let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31];
        for _ in 0..100 {
            let z = random_z(&mut rng, 3);
            let dec = cancelling::nn_decompose(&z).unwrap();
            let p = primes[rng.random_range(0..primes.len())];
            let a = rng.random_range(0..p);
            let b = rng.random_range(1..p);
            let n = cancelling::crt_witness(p, a, b);
            assert_eq!(n % p, a % p);
            assert_eq!(n % (p - 1), b % (p - 1));
            assert_eq!(
                cancelling::window_sum_mod(&dec, n, p).unwrap(),
                cancelling::congruence_entry(&dec, a, b, p).unwrap(),
            );
        }

        // every random candidate is refuted
        for _ in 0..10 {
            let z = random_z(&mut rng, 3);
            let report = cancelling::refute_nn_candidate(&z).unwrap();
            assert!(report.refuted, "candidate {z} survived the scan");
        }
    });
}

#[test]
fn criterion_09_weighted_models() {
    criterion(9, "weighted model separations", Duration::from_secs(5), || {
        let grammar = polyrec::automata::WcfgUnary::catalan_grammar();
        for n in 0..=20u64 {
            assert_eq!(
                grammar.catalan_view(n),
                Rat::from(oracle::catalan(n)),
                "derivation count at {n}"
            );
        }
        let nn_expr = dsl::parse_wmso("(prod x (sum y 1))", 1).unwrap();
        for n in 0..=12u64 {
            assert_eq!(nn_expr.eval(n), Rat::from(oracle::nn(n)), "n^n at {n}");
        }
        // the literal upper-triangular matrix with I selecting the first
        // coordinate and F the initial state
        let wa = polyrec::automata::UnaryWeightedAutomaton::new(
            vec![
                vec![int(1), int(2), int(1)],
                vec![int(0), int(1), int(1)],
                vec![int(0), int(0), int(1)],
            ],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(0), int(1)],
        )
        .unwrap();
        for n in 0..=40u64 {
            assert_eq!(wa.eval(n), int((n * n) as i64), "n^2 at {n}");
        }
    });
}

#[test]
fn criterion_10_rational_engine() {
    criterion(10, "rational step engine", Duration::from_secs(1), || {
        // C' = (4m + 2)/(m + 2) * C with an index-carrying sequence
        let c_num = x(2, 1)
            .scale(&int(4))
            .add(&MultiPoly::constant(2, int(2)))
            .mul(&x(2, 0));
        let c_den = x(2, 1).add(&MultiPoly::constant(2, int(2)));
        let m_num = x(2, 1).add(&MultiPoly::one(2));
        let system = RationalSystem::new(
            vec![(c_num, c_den), (m_num, MultiPoly::one(2))],
            vec![int(1), int(0)],
            0,
        )
        .unwrap();
        let prefix = system.output_prefix(30).unwrap();
        for (n, v) in prefix.iter().enumerate() {
            assert_eq!(*v, Rat::from(oracle::catalan(n as u64)), "C_{n}");
        }

        // vanishing denominators surface as the typed error, never a value
        let bad = RationalSystem::new(
            vec![
                (x(2, 0), x(2, 1).sub(&MultiPoly::one(2))),
                (x(2, 1).add(&MultiPoly::one(2)), MultiPoly::one(2)),
            ],
            vec![int(1), int(0)],
            0,
        )
        .unwrap();
        assert_eq!(
            bad.eval_output(2).unwrap_err(),
            EngineError::DenominatorVanished { step: 1, rule: 0 }
        );
    });
}

#[test]
fn criterion_11_robustness() {
    criterion(11, "robustness", Duration::from_secs(120), || {
        // 10^5 random inputs through the parsers: errors allowed, panics not
        let mut rng = StdRng::seed_from_u64(0x5eed_0011);
        let tokens = [
            "x0", "x1", "y", "next", "kind:", "vars:", "init:", "(", ")", "+", "-", "*", "/",
            "^", "1", "23", "1/2", "'", "=", "\n", " ",
        ];
        let vars = vec!["x0".to_string(), "x1".to_string()];
        for i in 0..100_000u32 {
            let input: String = match i % 3 {
                0 => {
                    // arbitrary bytes, decoded lossily
                    let len = rng.random_range(0..48usize);
                    let bytes: Vec<u8> = (0..len).map(|_| rng.random::<u8>()).collect();
                    String::from_utf8_lossy(&bytes).into_owned()
                }
                1 => {
                    // printable ASCII
                    let len = rng.random_range(0..48usize);
                    (0..len)
                        .map(|_| char::from(rng.random_range(0x20u8..0x7f)))
                        .collect()
                }
                _ => {
                    // token soup biased toward deeper parse paths
                    let len = rng.random_range(0..24usize);
                    (0..len)
                        .map(|_| tokens[rng.random_range(0..tokens.len())])
                        .collect()
                }
            };
            let _ = dsl::parse_expr(&input, &vars);
            let _ = dsl::parse_window_poly(&input);
            let _ = dsl::parse_doc(&input);
            let _ = dsl::parse_wmso(&input, 1);
        }

        // the growth guard reports an overflow instead of exhausting memory
        let tower = builtin(Builtin::PowerTower);
        match tower.eval_output(40) {
            Err(EngineError::Overflow { step, .. }) => assert!(step <= 25),
            other => panic!("expected an overflow error, got {other:?}"),
        }
    });
}
