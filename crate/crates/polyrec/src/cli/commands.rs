//! Subcommand implementations. Every handler produces a JSON value and a
//! human rendering of the same report; JSON output is deterministic (sorted
//! keys, exact rationals as strings).

use serde_json::{json, Value};

use super::{CliError, Command, Format, NormalizeStep, SearchMode, SCHEMA_VERSION};
use crate::automata::WmsoExpr;
use crate::cancelling::{
    self, Budget, CancellingCertificate, CertMode, EmpiricalVerdict, SymbolicVerdict,
};
use crate::convert;
use crate::dsl::{self, SequenceDoc};
use crate::engines::{EvalLimits, PolySystem, SequenceOracle};
use crate::modular::{self, PeriodicityReport, ScanVerdict};
use crate::normalize;
use crate::poly::{MultiPoly, Rat};

pub(super) fn dispatch(cmd: Command, format: Format) -> Result<String, CliError> {
    let (command, payload, human) = match cmd {
        Command::Eval { file, n, max_bits } => {
            let (v, h) = eval(&file, n, max_bits)?;
            ("eval", v, h)
        }
        Command::Convert { file, check } => {
            let (v, h) = convert_cmd(&file, check)?;
            ("convert", v, h)
        }
        Command::Normalize { file, step, degree } => {
            let (v, h) = normalize_cmd(&file, step, degree)?;
            ("normalize", v, h)
        }
        Command::ModAnalyze {
            file,
            prime,
            cutoff,
            window,
        } => {
            let (v, h) = mod_analyze(&file, prime, cutoff, window)?;
            ("mod-analyze", v, h)
        }
        Command::CatalanBlocks { prime, count } => {
            let (v, h) = catalan_blocks(prime, count)?;
            ("catalan-blocks", v, h)
        }
        Command::FindCancelling {
            file,
            degree,
            mode,
            window,
            samples,
            max_terms,
        } => {
            let (v, h) = find_cancelling(&file, degree, mode, window, samples, max_terms)?;
            ("find-cancelling", v, h)
        }
        Command::VerifyCancelling {
            file,
            poly,
            samples,
            max_terms,
        } => {
            let (v, h) = verify_cancelling(&file, &poly, samples, max_terms)?;
            ("verify-cancelling", v, h)
        }
        Command::FindSimple {
            file,
            window,
            degree,
            samples,
        } => {
            let (v, h) = find_simple(&file, window, degree, samples)?;
            ("find-simple", v, h)
        }
        Command::NnDecompose { poly } => {
            let (v, h) = nn_decompose(&poly)?;
            ("nn-decompose", v, h)
        }
        Command::NnRefute { poly } => {
            let (v, h) = nn_refute(&poly)?;
            ("nn-refute", v, h)
        }
        Command::WaEval { file, n } => {
            let (v, h) = wa_eval(&file, n)?;
            ("wa-eval", v, h)
        }
        Command::WcfgEval { file, n } => {
            let (v, h) = wcfg_eval(&file, n)?;
            ("wcfg-eval", v, h)
        }
        Command::WmsoEval { file, expr, n } => {
            let (v, h) = wmso_eval(file.as_deref(), expr.as_deref(), n)?;
            ("wmso-eval", v, h)
        }
    };
    match format {
        Format::Json => {
            let mut doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
            });
            doc.as_object_mut()
                .expect("document is an object")
                .extend(payload.as_object().cloned().unwrap_or_default());
            Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&doc).expect("reports serialize")
            ))
        }
        Format::Human => Ok(human),
    }
}

fn load_doc(path: &str) -> Result<SequenceDoc, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    Ok(dsl::parse_doc(&text)?)
}

/// Any document evaluates as a sequence.
fn doc_oracle(doc: &SequenceDoc) -> Box<dyn SequenceOracle + '_> {
    match doc {
        SequenceDoc::PolySystem { system, .. } => Box::new(system.clone()),
        SequenceDoc::LinearRecurrence { recurrence, .. } => Box::new(recurrence.clone()),
        SequenceDoc::SimpleRecurrence { recurrence, .. } => Box::new(recurrence.clone()),
        SequenceDoc::RationalSystem { system, .. } => Box::new(system.clone()),
        SequenceDoc::Oracle { oracle } => Box::new(oracle.clone()),
        SequenceDoc::Automaton { automaton } => Box::new(automaton.clone()),
        SequenceDoc::Wcfg { grammar, .. } => Box::new(grammar.clone()),
        SequenceDoc::Wmso { expr } => Box::new(expr.clone()),
    }
}

/// View rule-system-like documents as a polynomial system with print names.
fn doc_system(doc: &SequenceDoc) -> Option<(Vec<String>, PolySystem)> {
    match doc {
        SequenceDoc::PolySystem { names, system } => Some((names.clone(), system.clone())),
        SequenceDoc::LinearRecurrence { names, recurrence } => {
            Some((names.clone(), convert::linear_to_system(recurrence)))
        }
        SequenceDoc::SimpleRecurrence { names, recurrence } => {
            Some((names.clone(), convert::simple_to_system(recurrence)))
        }
        SequenceDoc::Automaton { automaton } => {
            let system = crate::automata::wa_to_linear_system(automaton).ok()?;
            let mut names = vec!["out".to_string()];
            names.extend((0..automaton.dim()).map(|i| format!("s{i}")));
            Some((names, system))
        }
        _ => None,
    }
}

fn rat_str(v: &Rat) -> String {
    v.to_string()
}

fn rat_strs(vs: &[Rat]) -> Vec<String> {
    vs.iter().map(rat_str).collect()
}

fn cert_json(c: &CancellingCertificate) -> Value {
    let mode = match &c.mode {
        CertMode::Symbolic => json!({"kind": "symbolic"}),
        CertMode::Empirical { samples } => json!({"kind": "empirical", "samples": samples}),
    };
    json!({
        "poly": c.poly.to_string(),
        "window_len": c.window_len(),
        "mode": mode,
    })
}

fn eval(file: &str, n: u64, max_bits: Option<u64>) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    let value = match (&doc, max_bits) {
        (SequenceDoc::PolySystem { system, .. }, Some(bits)) => {
            let limits = EvalLimits { max_bits: bits };
            system
                .output_prefix_with(n, limits)?
                .pop()
                .expect("prefix nonempty")
        }
        _ => doc_oracle(&doc).value(n)?,
    };
    let mut payload = json!({
        "kind": doc.kind(),
        "n": n,
        "value": rat_str(&value),
    });
    let mut human = format!("kind:  {}\nn:     {}\nvalue: {}\n", doc.kind(), n, value);
    if let SequenceDoc::Wcfg { grammar, .. } = &doc {
        let view = grammar.catalan_view(n);
        payload
            .as_object_mut()
            .expect("object")
            .insert("catalan_view".to_string(), json!(rat_str(&view)));
        human.push_str(&format!("catalan_view: {view}\n"));
    }
    Ok((payload, human))
}

fn convert_cmd(file: &str, check: u64) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    match &doc {
        SequenceDoc::LinearRecurrence { names, recurrence } => {
            let system = convert::linear_to_system(recurrence);
            let out = SequenceDoc::PolySystem {
                names: names.clone(),
                system: system.clone(),
            };
            let agree = (0..=check).all(|n| {
                system.eval_output(n).map(|v| v == recurrence.eval(n)) == Ok(true)
            });
            let payload = json!({
                "direction": "to-system",
                "system": out.to_string(),
                "agreement_checked_to": check,
                "agrees": agree,
            });
            let human = format!(
                "direction: single recurrence -> system\n\n{}\nagreement on 0..={check}: {}\n",
                out, if agree { "exact" } else { "MISMATCH" }
            );
            Ok((payload, human))
        }
        SequenceDoc::SimpleRecurrence { names, recurrence } => {
            let system = convert::simple_to_system(recurrence);
            let out = SequenceDoc::PolySystem {
                names: names.clone(),
                system: system.clone(),
            };
            let agree = (0..=check).all(|n| {
                system.eval_output(n).map(|v| v == recurrence.eval(n)) == Ok(true)
            });
            let payload = json!({
                "direction": "to-system",
                "system": out.to_string(),
                "agreement_checked_to": check,
                "agrees": agree,
            });
            let human = format!(
                "direction: single recurrence -> system\n\n{}\nagreement on 0..={check}: {}\n",
                out, if agree { "exact" } else { "MISMATCH" }
            );
            Ok((payload, human))
        }
        SequenceDoc::PolySystem { system, .. } => {
            let (rec, kernel) = convert::linear_system_to_single(system)?;
            let agree = (0..=check)
                .all(|n| system.eval_output(n).map(|v| v == rec.eval(n)) == Ok(true));
            let payload = json!({
                "direction": "to-single",
                "order": rec.order(),
                "coefficients": rat_strs(rec.coeffs()),
                "init": rat_strs(rec.init()),
                "kernel": rat_strs(kernel.coeffs()),
                "agreement_checked_to": check,
                "agrees": agree,
            });
            let window_names: Vec<String> =
                (0..rec.order()).map(|i| format!("u[n+{i}]")).collect();
            let rule = rec
                .coeffs()
                .iter()
                .enumerate()
                .fold(MultiPoly::zero(rec.order()), |acc, (i, c)| {
                    acc.add(&MultiPoly::var(rec.order(), i).scale(c))
                });
            let human = format!(
                "direction: system -> single recurrence\norder: {}\nrecurrence: u[n+{}] = {}\ninit: {}\nkernel form: {}\nagreement on 0..={check}: {}\n",
                rec.order(),
                rec.order(),
                rule.render(&window_names),
                rat_strs(rec.init()).join(" "),
                rat_strs(kernel.coeffs()).join(" "),
                if agree { "exact" } else { "MISMATCH" }
            );
            Ok((payload, human))
        }
        _ => Err(CliError::UnsupportedKind {
            command: "convert",
            kind: doc.kind(),
        }),
    }
}

/// A variable name not colliding with the given ones.
fn fresh_name(names: &[String], base: &str) -> String {
    if !names.iter().any(|n| n == base) {
        return base.to_string();
    }
    let mut i = 1;
    loop {
        let cand = format!("{base}{i}");
        if !names.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

fn normalize_cmd(
    file: &str,
    step: NormalizeStep,
    degree: Option<u32>,
) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    let SequenceDoc::PolySystem { names, system } = &doc else {
        return Err(CliError::UnsupportedKind {
            command: "normalize",
            kind: doc.kind(),
        });
    };
    let mut meta = json!({});
    let obj = meta.as_object_mut().expect("object");
    let (after, after_names) = match step {
        NormalizeStep::Integerize => {
            let (out, qs, output_integral) = normalize::integerize_initials(system);
            obj.insert(
                "qs".to_string(),
                json!(qs.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
            );
            obj.insert("output_integral".to_string(), json!(output_integral));
            (out, names.clone())
        }
        NormalizeStep::Homogenize => {
            let (out, d) = normalize::homogenize(system, degree)?;
            obj.insert("d".to_string(), json!(d));
            let mut ns = names.clone();
            ns.push(fresh_name(names, "w"));
            (out, ns)
        }
        NormalizeStep::IntegerScale => {
            let (out, a) = normalize::integer_scale(system)?;
            obj.insert("a".to_string(), json!(a.to_string()));
            (out, names.clone())
        }
        NormalizeStep::Pipeline => {
            let (out, meta_full) = normalize::pipeline(system)?;
            obj.insert("a".to_string(), json!(meta_full.a.to_string()));
            obj.insert("d".to_string(), json!(meta_full.d));
            obj.insert(
                "qs".to_string(),
                json!(meta_full.qs.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
            );
            obj.insert(
                "output_integral".to_string(),
                json!(meta_full.output_integral),
            );
            let mut ns = names.clone();
            ns.push(fresh_name(names, "w"));
            (out, ns)
        }
    };
    let after_doc = SequenceDoc::PolySystem {
        names: after_names,
        system: after,
    };
    let step_name = match step {
        NormalizeStep::Integerize => "integerize",
        NormalizeStep::Homogenize => "homogenize",
        NormalizeStep::IntegerScale => "integer-scale",
        NormalizeStep::Pipeline => "pipeline",
    };
    let payload = json!({
        "step": step_name,
        "before": doc.to_string(),
        "after": after_doc.to_string(),
        "meta": meta,
    });
    let human = format!(
        "step: {step_name}\n\n--- before ---\n{doc}\n--- after ---\n{after_doc}\nmeta: {meta}\n"
    );
    Ok((payload, human))
}

fn periodicity_json(r: &PeriodicityReport) -> Value {
    match r {
        PeriodicityReport::Periodic { preperiod, period } => {
            json!({"status": "periodic", "preperiod": preperiod, "period": period})
        }
        PeriodicityReport::CutoffExhausted { steps } => {
            json!({"status": "cutoff-exhausted", "steps": steps})
        }
    }
}

fn periodicity_human(r: &PeriodicityReport) -> String {
    match r {
        PeriodicityReport::Periodic { preperiod, period } => {
            format!("preperiod {preperiod}, period {period}")
        }
        PeriodicityReport::CutoffExhausted { steps } => {
            format!("no repeat within {steps} steps")
        }
    }
}

fn mod_analyze(
    file: &str,
    prime: u64,
    cutoff: Option<u64>,
    window: Option<u64>,
) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    if let SequenceDoc::Oracle { oracle } = &doc {
        let window = window.unwrap_or(200);
        let report = modular::oracle_mod_scan(oracle, prime, window)?;
        let shown: Vec<u64> = report.residues.iter().take(40).copied().collect();
        let verdict_json = match &report.verdict {
            ScanVerdict::PeriodFound { preperiod, period } => {
                json!({"status": "period-found", "preperiod": preperiod, "period": period})
            }
            ScanVerdict::NoneFound { max_period } => {
                json!({"status": "none-found", "max_period_checked": max_period})
            }
        };
        let payload = json!({
            "kind": "oracle",
            "prime": prime,
            "window": window,
            "residue_prefix": shown,
            "verdict": verdict_json,
        });
        let verdict_h = match &report.verdict {
            ScanVerdict::PeriodFound { preperiod, period } => {
                format!("preperiod {preperiod}, period {period} (validated over the whole prefix)")
            }
            ScanVerdict::NoneFound { max_period } => {
                format!("no period found <= {max_period} (bounded scan, not a proof)")
            }
        };
        let human = format!(
            "oracle {} mod {prime}, window {window}\nresidues: {}\nverdict: {}\n",
            oracle.name(),
            shown
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            verdict_h
        );
        return Ok((payload, human));
    }

    let Some((_, system)) = doc_system(&doc) else {
        return Err(CliError::UnsupportedKind {
            command: "mod-analyze",
            kind: doc.kind(),
        });
    };

    // Reconstruction handles both integral and rational systems; it yields
    // the output residues and the scaled ModSystem it iterates internally.
    let recon = modular::ResidueReconstruction::new(&system, prime)?;
    let meta = recon.meta().clone();
    let (scaled, _) = normalize::pipeline(&system)?;
    let msys = modular::ModSystem::from_system(&scaled, prime)?;
    let k = msys.dim() as u32;
    let default_cutoff = (prime as u128)
        .checked_pow(k)
        .map(|v| v.saturating_add(1).min(1_000_000) as u64)
        .unwrap_or(1_000_000);
    let cutoff = cutoff.unwrap_or(default_cutoff);
    let state = modular::detect_period(&msys, cutoff);
    let projected = if state.is_periodic() {
        Some(modular::project_period(&msys, &state, msys.output_index())?)
    } else {
        None
    };
    let residues: Vec<u64> = recon.take(40).collect();
    let payload = json!({
        "kind": doc.kind(),
        "prime": prime,
        "cutoff": cutoff,
        "scaling": {"a": meta.a.to_string(), "d": meta.d},
        "state": periodicity_json(&state),
        "output": projected.as_ref().map(periodicity_json),
        "residue_prefix": residues,
    });
    let human = format!(
        "system mod {prime} (scaled by a = {}, common degree d = {})\nstate:  {}\noutput: {}\nresidues: {}\n",
        meta.a,
        meta.d,
        periodicity_human(&state),
        projected
            .as_ref()
            .map(periodicity_human)
            .unwrap_or_else(|| "n/a".to_string()),
        residues
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok((payload, human))
}

fn catalan_blocks(prime: u64, count: u64) -> Result<(Value, String), CliError> {
    let report = modular::catalan_blocks(prime, count)?;
    let blocks: Vec<Value> = report
        .blocks
        .iter()
        .map(|b| {
            json!({
                "index": b.index,
                "start": b.start,
                "observed": b.observed_len,
                "predicted": b.predicted_len,
            })
        })
        .collect();
    let all_match = report
        .blocks
        .iter()
        .all(|b| b.observed_len == b.predicted_len);
    let payload = json!({
        "prime": prime,
        "blocks": blocks,
        "all_match": all_match,
    });
    let mut human = format!("runs of Catalan numbers divisible by {prime}\n");
    human.push_str("  k  start  observed  predicted\n");
    for b in &report.blocks {
        human.push_str(&format!(
            "{:>3}  {:>5}  {:>8}  {:>9}\n",
            b.index, b.start, b.observed_len, b.predicted_len
        ));
    }
    human.push_str(&format!(
        "observed {} predicted\n",
        if all_match { "==" } else { "!=" }
    ));
    Ok((payload, human))
}

fn find_cancelling(
    file: &str,
    degree: u32,
    mode: Option<SearchMode>,
    window: Option<usize>,
    samples: Option<u64>,
    max_terms: Option<usize>,
) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    let budget = max_terms
        .map(|max_terms| Budget { max_terms })
        .unwrap_or_default();
    let system = doc_system(&doc);
    let mode = mode.unwrap_or(if system.is_some() {
        SearchMode::Symbolic
    } else {
        SearchMode::Empirical
    });
    match mode {
        SearchMode::Symbolic => {
            let Some((_, system)) = system else {
                return Err(CliError::UnsupportedKind {
                    command: "find-cancelling --mode symbolic",
                    kind: doc.kind(),
                });
            };
            let search = cancelling::find_cancelling_symbolic(&system, degree, &budget)?;
            let payload = json!({
                "mode": "symbolic",
                "degree_bound": degree,
                "window_len": system.dim() + 1,
                "basis": search.basis.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "certificates": search.certificates.iter().map(cert_json).collect::<Vec<_>>(),
                "found": !search.basis.is_empty(),
            });
            let mut human = format!(
                "symbolic search, window variables x0..x{}, degree <= {degree}\n",
                system.dim()
            );
            if search.basis.is_empty() {
                human.push_str("no cancelling polynomial within this degree bound\n(existence at higher degree is not excluded)\n");
            } else {
                human.push_str("cancelling polynomials (exact, basis of all solutions):\n");
                for p in &search.basis {
                    human.push_str(&format!("  {p}\n"));
                }
            }
            Ok((payload, human))
        }
        SearchMode::Empirical => {
            let Some(window) = window else {
                return Err(CliError::Usage(
                    "--window is required for the empirical mode".to_string(),
                ));
            };
            let monos = crate::poly::monomials_up_to_degree(window + 1, degree).len() as u64;
            let needed = monos + monos.div_ceil(4);
            let samples = samples.unwrap_or(needed);
            let oracle = doc_oracle(&doc);
            let search =
                cancelling::find_cancelling_empirical(oracle.as_ref(), window, degree, samples)?;
            let payload = json!({
                "mode": "empirical",
                "degree_bound": degree,
                "window_len": window + 1,
                "samples": samples,
                "nullspace": search.nullspace.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "certificates": search.certificates.iter().map(cert_json).collect::<Vec<_>>(),
                "conclusively_empty": search.conclusively_empty(),
            });
            let mut human = format!(
                "empirical search, window variables x0..x{window}, degree <= {degree}, {samples} samples\n"
            );
            if search.conclusively_empty() {
                human.push_str("nullspace empty: NO cancelling polynomial exists at these bounds\n(the sampled conditions are necessary, so emptiness is conclusive)\n");
            } else {
                human.push_str("candidate basis (sampled conditions only):\n");
                for p in &search.nullspace {
                    human.push_str(&format!("  {p}\n"));
                }
                human.push_str(&format!(
                    "survivors re-verified to {} samples: {}\n",
                    samples * 2,
                    search.certificates.len()
                ));
            }
            Ok((payload, human))
        }
    }
}

fn verify_cancelling(
    file: &str,
    poly: &str,
    samples: Option<u64>,
    max_terms: Option<usize>,
) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    let q = dsl::parse_window_poly(poly)?;
    let budget = max_terms
        .map(|max_terms| Budget { max_terms })
        .unwrap_or_default();
    let mut payload = json!({
        "poly": q.to_string(),
        "window_len": q.varcount(),
    });
    let obj = payload.as_object_mut().expect("object");
    let mut human = String::new();

    if let Some((_, system)) = doc_system(&doc) {
        let verdict = cancelling::verify_symbolic(&system, &q, &budget)?;
        match &verdict {
            SymbolicVerdict::Cancelling => {
                obj.insert("symbolic".to_string(), json!({"status": "pass"}));
                human.push_str("symbolic: PASS (composition with the iterated rules is identically zero)\n");
            }
            SymbolicVerdict::NotCancelling { residual } => {
                obj.insert(
                    "symbolic".to_string(),
                    json!({"status": "fail", "residual": residual.to_string()}),
                );
                human.push_str(&format!("symbolic: FAIL\nresidual: {residual}\n"));
            }
        }
        if let Some(n) = samples {
            let verdict = cancelling::verify_empirical(&system, &q, n)?;
            append_empirical(obj, &mut human, &verdict, n);
        }
    } else {
        let n = samples.unwrap_or(100);
        let oracle = doc_oracle(&doc);
        let verdict = cancelling::verify_empirical(oracle.as_ref(), &q, n)?;
        append_empirical(obj, &mut human, &verdict, n);
    }
    Ok((payload, human))
}

fn append_empirical(
    obj: &mut serde_json::Map<String, Value>,
    human: &mut String,
    verdict: &EmpiricalVerdict,
    samples: u64,
) {
    match verdict {
        EmpiricalVerdict::Pass => {
            obj.insert(
                "empirical".to_string(),
                json!({"status": "pass", "samples": samples}),
            );
            human.push_str(&format!("empirical({samples}): PASS\n"));
        }
        EmpiricalVerdict::Counterexample { n, value } => {
            obj.insert(
                "empirical".to_string(),
                json!({"status": "counterexample", "n": n, "value": rat_str(value)}),
            );
            human.push_str(&format!(
                "empirical({samples}): counterexample at n = {n}, value {value}\n"
            ));
        }
    }
}

fn find_simple(
    file: &str,
    window: usize,
    degree: u32,
    samples: u64,
) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    let oracle = doc_oracle(&doc);
    let search = cancelling::find_simple_recurrence(oracle.as_ref(), window, degree, samples)?;
    let payload = json!({
        "window": window,
        "degree_bound": degree,
        "samples": samples,
        "consistent": search.consistent,
        "conclusively_none": search.conclusively_none(),
        "particular": search.particular.as_ref().map(|p| p.to_string()),
        "homogeneous": search.homogeneous.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "candidates": search.candidates.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "certificates": search.certificates.iter().map(cert_json).collect::<Vec<_>>(),
    });
    let mut human = format!(
        "single-recurrence fit: u[n+{window}] = P(u[n..n+{window}]), deg P <= {degree}, {samples} samples\n"
    );
    if search.conclusively_none() {
        human.push_str(
            "inconsistent: NO such recurrence exists at these bounds (conclusive)\n",
        );
    } else {
        human.push_str(&format!(
            "particular rule: u[n+{window}] = {}\n",
            search
                .particular
                .as_ref()
                .expect("consistent search has a particular solution")
        ));
        if !search.homogeneous.is_empty() {
            human.push_str(&format!(
                "solution space dimension: {}\n",
                search.homogeneous.len()
            ));
        }
        human.push_str(&format!(
            "candidates surviving re-verification to {} samples: {}\n",
            samples * 2,
            search.certificates.len()
        ));
        for c in &search.certificates {
            human.push_str(&format!("  {}\n", c.poly));
        }
    }
    Ok((payload, human))
}

fn nn_decompose(poly: &str) -> Result<(Value, String), CliError> {
    let z = dsl::parse_window_poly(poly)?;
    let dec = cancelling::nn_decompose(&z)?;
    let pairs: Vec<Value> = dec
        .pairs()
        .iter()
        .map(|(p, q)| json!({"p": p.to_string(), "q": q.to_string()}))
        .collect();
    let payload = json!({
        "z": z.to_string(),
        "m": dec.len(),
        "pairs": pairs,
        "s": dec.s_poly().to_string(),
    });
    let mut human = format!(
        "Z = {z}\nZ(n^n, ..., (n+k)^(n+k)) = sum of {} terms P_i(n)^n * Q_i(n)\n",
        dec.len()
    );
    for (i, (p, q)) in dec.pairs().iter().enumerate() {
        human.push_str(&format!("  P_{} = {p}\n  Q_{} = {q}\n", i + 1, i + 1));
    }
    human.push_str(&format!("S = {}\n", dec.s_poly()));
    Ok((payload, human))
}

fn nn_refute(poly: &str) -> Result<(Value, String), CliError> {
    let z = dsl::parse_window_poly(poly)?;
    let report = cancelling::refute_nn_candidate(&z)?;
    let violations: Vec<Value> = report
        .scan
        .violations
        .iter()
        .map(|v| json!({"a": v.a, "b": v.b, "value": v.value}))
        .collect();
    let payload = json!({
        "z": z.to_string(),
        "prime": report.p,
        "refuted": report.refuted,
        "violations": violations,
        "pairs_scanned": report.scan.pairs_scanned,
        "exhaustive": report.scan.exhaustive,
    });
    let mut human = format!("Z = {z}\nscan prime: {}\n", report.p);
    if report.refuted {
        human.push_str(&format!(
            "REFUTED: {} nonzero congruence entries found (showing up to 16)\n",
            report.scan.violations.len()
        ));
        for v in report.scan.violations.iter().take(16) {
            human.push_str(&format!(
                "  a = {}, b = {}: sum P_i(a)^b Q_i(a) = {} mod {}\n",
                v.a, v.b, v.value, report.p
            ));
        }
        human.push_str("a cancelling polynomial for n^n would make every entry 0\n");
    } else {
        human.push_str(
            "no violations over the full grid; flagging for manual inspection\n",
        );
    }
    Ok((payload, human))
}

fn wa_eval(file: &str, n: u64) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    let SequenceDoc::Automaton { automaton } = &doc else {
        return Err(CliError::UnsupportedKind {
            command: "wa-eval",
            kind: doc.kind(),
        });
    };
    let value = automaton.eval(n);
    let payload = json!({"n": n, "value": rat_str(&value)});
    Ok((payload, format!("value at length {n}: {value}\n")))
}

fn wcfg_eval(file: &str, n: u64) -> Result<(Value, String), CliError> {
    let doc = load_doc(file)?;
    let SequenceDoc::Wcfg { grammar, .. } = &doc else {
        return Err(CliError::UnsupportedKind {
            command: "wcfg-eval",
            kind: doc.kind(),
        });
    };
    let raw = grammar.eval(n);
    let view = grammar.catalan_view(n);
    let payload = json!({
        "n": n,
        "length_weight": rat_str(&raw),
        "catalan_view": rat_str(&view),
    });
    let human = format!(
        "weight of the length-{n} word: {raw}\nderivation-count view (index {n} = length {}): {view}\n",
        2 * n + 1
    );
    Ok((payload, human))
}

fn wmso_eval(
    file: Option<&str>,
    expr: Option<&str>,
    n: u64,
) -> Result<(Value, String), CliError> {
    let expr: WmsoExpr = match (file, expr) {
        (Some(path), None) => {
            let doc = load_doc(path)?;
            let SequenceDoc::Wmso { expr } = doc else {
                return Err(CliError::UnsupportedKind {
                    command: "wmso-eval",
                    kind: doc.kind(),
                });
            };
            expr
        }
        (None, Some(text)) => {
            let e = dsl::parse_wmso(text, 1)?;
            e.validate()?;
            e
        }
        _ => {
            return Err(CliError::Usage(
                "wmso-eval needs exactly one of --file or --expr".to_string(),
            ))
        }
    };
    let value = expr.eval(n);
    let payload = json!({"n": n, "value": rat_str(&value)});
    Ok((payload, format!("value on the length-{n} word: {value}\n")))
}
