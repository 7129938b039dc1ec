//! Python bindings: exact sequence definitions, evaluation, representation
//! conversions, modular analysis and window-polynomial search, with
//! rationals crossing the boundary as `fractions.Fraction`.

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use polyrec::cancelling::{self, Budget, EmpiricalVerdict, SymbolicVerdict};
use polyrec::convert;
use polyrec::dsl::{self, SequenceDoc};
use polyrec::engines::SequenceOracle;
use polyrec::modular::{self, PeriodicityReport, ScanVerdict};
use polyrec::normalize;
use polyrec::{MultiPoly, Rat};

fn value_err<E: std::fmt::Display>(name: &str) -> impl Fn(E) -> PyErr + '_ {
    move |e| PyValueError::new_err(format!("[{name}] {e}"))
}

/// Multivariate polynomial with exact rational coefficients.
#[pyclass(name = "Poly", from_py_object)]
#[derive(Clone)]
struct PyPoly {
    inner: MultiPoly,
    names: Vec<String>,
}

impl PyPoly {
    fn wrap(inner: MultiPoly) -> Self {
        let names = (0..inner.varcount()).map(|i| format!("x{i}")).collect();
        PyPoly { inner, names }
    }

    fn binop_check(&self, other: &PyPoly) -> PyResult<()> {
        if self.inner.varcount() != other.inner.varcount() {
            return Err(PyValueError::new_err(format!(
                "[VarcountMismatch] {} vs {} variables",
                self.inner.varcount(),
                other.inner.varcount()
            )));
        }
        Ok(())
    }
}

#[pymethods]
impl PyPoly {
    /// Parse over explicit variable names, or over inferred window
    /// variables x0..xk when `vars` is omitted.
    #[new]
    #[pyo3(signature = (text, vars=None))]
    fn new(text: &str, vars: Option<Vec<String>>) -> PyResult<Self> {
        match vars {
            Some(names) => {
                let p = dsl::parse_expr(text, &names).map_err(|e| {
                    PyValueError::new_err(format!("[{}] {}", e.name(), e.message()))
                })?;
                Ok(PyPoly { inner: p, names })
            }
            None => {
                let p = dsl::parse_window_poly(text).map_err(|e| {
                    PyValueError::new_err(format!("[{}] {}", e.name(), e.message()))
                })?;
                Ok(PyPoly::wrap(p))
            }
        }
    }

    fn __str__(&self) -> String {
        self.inner.render(&self.names)
    }

    fn __repr__(&self) -> String {
        format!("Poly('{}')", self.inner.render(&self.names))
    }

    fn __add__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        self.binop_check(other)?;
        Ok(PyPoly {
            inner: self.inner.add(&other.inner),
            names: self.names.clone(),
        })
    }

    fn __sub__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        self.binop_check(other)?;
        Ok(PyPoly {
            inner: self.inner.sub(&other.inner),
            names: self.names.clone(),
        })
    }

    fn __mul__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        self.binop_check(other)?;
        let p = self
            .inner
            .try_mul(&other.inner)
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        Ok(PyPoly {
            inner: p,
            names: self.names.clone(),
        })
    }

    fn __neg__(&self) -> PyPoly {
        PyPoly {
            inner: self.inner.neg(),
            names: self.names.clone(),
        }
    }

    fn __pow__(&self, e: u32, _mod: Option<u32>) -> PyResult<PyPoly> {
        let p = self
            .inner
            .try_pow(e)
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        Ok(PyPoly {
            inner: p,
            names: self.names.clone(),
        })
    }

    fn __richcmp__(&self, other: &PyPoly, op: pyo3::basic::CompareOp) -> PyResult<bool> {
        match op {
            pyo3::basic::CompareOp::Eq => Ok(self.inner == other.inner),
            pyo3::basic::CompareOp::Ne => Ok(self.inner != other.inner),
            _ => Err(PyValueError::new_err("polynomials are not ordered")),
        }
    }

    #[getter]
    fn varcount(&self) -> usize {
        self.inner.varcount()
    }

    fn degree(&self) -> Option<u32> {
        self.inner.total_degree()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn evaluate(&self, point: Vec<Rat>) -> PyResult<Rat> {
        self.inner
            .evaluate(&point)
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))
    }

    /// Smallest positive integer scaling all coefficients to integers,
    /// with the scaled polynomial.
    fn clear_denominators(&self) -> PyResult<(BigInt, PyPoly)> {
        let (s, q) = self
            .inner
            .clear_denominators()
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        Ok((
            s,
            PyPoly {
                inner: q,
                names: self.names.clone(),
            },
        ))
    }
}

fn builtin_doc(name: &str) -> PyResult<SequenceDoc> {
    let system = polyrec::builtin_by_name(name).map_err(value_err("UnknownBuiltin"))?;
    let names: Vec<String> = match name {
        "fibonacci" => vec!["f", "g"],
        "factorial" => vec!["b", "c"],
        "nsquared" => vec!["a", "b", "c"],
        "power_tower" => vec!["a"],
        "two_pow_nsq" => vec!["d", "e"],
        _ => unreachable!("builtin_by_name succeeded"),
    }
    .into_iter()
    .map(str::to_string)
    .collect();
    Ok(SequenceDoc::PolySystem { names, system })
}

/// A sequence definition of any document kind.
#[pyclass(name = "Sequence")]
struct PySequence {
    doc: SequenceDoc,
}

#[pymethods]
impl PySequence {
    /// Parse a sequence document.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let doc = dsl::parse_doc(text).map_err(|e| {
            PyValueError::new_err(format!("[{}] {e}", e.name()))
        })?;
        Ok(PySequence { doc })
    }

    /// One of the stock systems: fibonacci, factorial, nsquared,
    /// power_tower, two_pow_nsq.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PySequence {
            doc: builtin_doc(name)?,
        })
    }

    /// A closed-form reference sequence: n^n, catalan, factorial,
    /// power_tower.
    #[staticmethod]
    fn oracle(name: &str) -> PyResult<Self> {
        let oracle = polyrec::OracleSequence::by_name(name)
            .ok_or_else(|| PyValueError::new_err(format!("[UnknownBuiltin] `{name}`")))?;
        Ok(PySequence {
            doc: SequenceDoc::Oracle { oracle },
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.doc.kind()
    }

    fn __str__(&self) -> String {
        self.doc.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Sequence(kind='{}')", self.doc.kind())
    }

    /// Exact value at index n.
    fn eval(&self, n: u64) -> PyResult<Rat> {
        self.doc.value(n).map_err(|e| {
            PyValueError::new_err(format!("[{}] {e}", e.name()))
        })
    }

    /// Values at indices 0..count.
    fn prefix(&self, count: u64) -> PyResult<Vec<Rat>> {
        self.doc.prefix(count).map_err(|e| {
            PyValueError::new_err(format!("[{}] {e}", e.name()))
        })
    }

    /// Convert an affine-rule system document to a single linear
    /// recurrence; returns (coefficients, initial values).
    fn to_single(&self) -> PyResult<(Vec<Rat>, Vec<Rat>)> {
        let SequenceDoc::PolySystem { system, .. } = &self.doc else {
            return Err(PyValueError::new_err(
                "[UnsupportedKind] to_single needs a poly_system document",
            ));
        };
        let (rec, _) = convert::linear_system_to_single(system)
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        Ok((rec.coeffs().to_vec(), rec.init().to_vec()))
    }

    /// Exact search for cancelling window polynomials of bounded degree.
    fn find_cancelling_symbolic(&self, degree: u32) -> PyResult<Vec<PyPoly>> {
        let SequenceDoc::PolySystem { system, .. } = &self.doc else {
            return Err(PyValueError::new_err(
                "[UnsupportedKind] the symbolic search needs a poly_system document",
            ));
        };
        let search = cancelling::find_cancelling_symbolic(system, degree, &Budget::default())
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        Ok(search.basis.into_iter().map(PyPoly::wrap).collect())
    }

    /// Sampled nullspace search; an empty nullspace conclusively excludes
    /// cancelling polynomials at these bounds.
    fn find_cancelling_empirical<'py>(
        &self,
        py: Python<'py>,
        window: usize,
        degree: u32,
        samples: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let search =
            cancelling::find_cancelling_empirical(&self.doc, window, degree, samples)
                .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        let out = PyDict::new(py);
        out.set_item("conclusively_empty", search.conclusively_empty())?;
        out.set_item(
            "nullspace",
            search
                .nullspace
                .iter()
                .cloned()
                .map(PyPoly::wrap)
                .collect::<Vec<_>>(),
        )?;
        out.set_item(
            "certificates",
            search
                .certificates
                .iter()
                .map(|c| PyPoly::wrap(c.poly.clone()))
                .collect::<Vec<_>>(),
        )?;
        Ok(out)
    }

    /// Fit a single polynomial recurrence u(n+k) = P(u(n)..u(n+k-1)).
    fn find_simple<'py>(
        &self,
        py: Python<'py>,
        window: usize,
        degree: u32,
        samples: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let search = cancelling::find_simple_recurrence(&self.doc, window, degree, samples)
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        let out = PyDict::new(py);
        out.set_item("consistent", search.consistent)?;
        out.set_item("conclusively_none", search.conclusively_none())?;
        out.set_item(
            "particular",
            search.particular.clone().map(PyPoly::wrap),
        )?;
        out.set_item(
            "certificates",
            search
                .certificates
                .iter()
                .map(|c| PyPoly::wrap(c.poly.clone()))
                .collect::<Vec<_>>(),
        )?;
        Ok(out)
    }

    /// Verify a window polynomial. System documents get the exact check;
    /// everything else is sampled at `samples` indices (default 100).
    #[pyo3(signature = (poly, samples=None))]
    fn verify_cancelling(&self, poly: &PyPoly, samples: Option<u64>) -> PyResult<bool> {
        if let SequenceDoc::PolySystem { system, .. } = &self.doc {
            let verdict = cancelling::verify_symbolic(system, &poly.inner, &Budget::default())
                .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
            return Ok(verdict == SymbolicVerdict::Cancelling);
        }
        let verdict =
            cancelling::verify_empirical(&self.doc, &poly.inner, samples.unwrap_or(100))
                .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        Ok(verdict == EmpiricalVerdict::Pass)
    }

    /// Minimal (preperiod, period) of the output residues mod p, or None
    /// when no repeat occurs within the cutoff.
    #[pyo3(signature = (p, cutoff=None))]
    fn mod_period(&self, p: u64, cutoff: Option<u64>) -> PyResult<Option<(u64, u64)>> {
        let system = self.as_system()?;
        let (scaled, _) =
            normalize::pipeline(&system).map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        let msys = modular::ModSystem::from_system(&scaled, p)
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        let default_cutoff = (p as u128)
            .checked_pow(msys.dim() as u32)
            .map(|v| v.saturating_add(1).min(1_000_000) as u64)
            .unwrap_or(1_000_000);
        let state = modular::detect_period(&msys, cutoff.unwrap_or(default_cutoff));
        if !state.is_periodic() {
            return Ok(None);
        }
        let projected = modular::project_period(&msys, &state, msys.output_index())
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        match projected {
            PeriodicityReport::Periodic { preperiod, period } => Ok(Some((preperiod, period))),
            PeriodicityReport::CutoffExhausted { .. } => Ok(None),
        }
    }

    /// First `count` output residues mod p (valid for any rational-data
    /// system whose output sequence is integral).
    fn mod_residues(&self, p: u64, count: usize) -> PyResult<Vec<u64>> {
        let system = self.as_system()?;
        modular::reconstruct_residues(&system, p, count)
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))
    }

    /// Bounded periodicity scan of oracle residues mod p; returns
    /// (preperiod, period) or None.
    fn mod_scan(&self, p: u64, window: u64) -> PyResult<Option<(u64, u64)>> {
        let SequenceDoc::Oracle { oracle } = &self.doc else {
            return Err(PyValueError::new_err(
                "[UnsupportedKind] mod_scan needs an oracle document",
            ));
        };
        let report = modular::oracle_mod_scan(oracle, p, window)
            .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
        Ok(match report.verdict {
            ScanVerdict::PeriodFound { preperiod, period } => Some((preperiod, period)),
            ScanVerdict::NoneFound { .. } => None,
        })
    }
}

impl PySequence {
    fn as_system(&self) -> PyResult<polyrec::PolySystem> {
        match &self.doc {
            SequenceDoc::PolySystem { system, .. } => Ok(system.clone()),
            SequenceDoc::LinearRecurrence { recurrence, .. } => {
                Ok(convert::linear_to_system(recurrence))
            }
            SequenceDoc::SimpleRecurrence { recurrence, .. } => {
                Ok(convert::simple_to_system(recurrence))
            }
            _ => Err(PyValueError::new_err(
                "[UnsupportedKind] this operation needs a rule-system document",
            )),
        }
    }
}

/// Rewrite a window polynomial against the n^n window as
/// sum_i P_i(n)^n Q_i(n); returns a dict with the pairs and the product
/// polynomial S.
#[pyfunction]
fn nn_decompose<'py>(py: Python<'py>, poly: &PyPoly) -> PyResult<Bound<'py, PyDict>> {
    let dec = cancelling::nn_decompose(&poly.inner)
        .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
    let out = PyDict::new(py);
    out.set_item("m", dec.len())?;
    out.set_item(
        "pairs",
        dec.pairs()
            .iter()
            .map(|(p, q)| (p.to_string(), q.to_string()))
            .collect::<Vec<_>>(),
    )?;
    out.set_item("s", dec.s_poly().to_string())?;
    Ok(out)
}

/// Refute a candidate cancelling polynomial for n^n. Returns a dict with
/// the scan prime, refutation flag and the first violations.
#[pyfunction]
fn nn_refute<'py>(py: Python<'py>, poly: &PyPoly) -> PyResult<Bound<'py, PyDict>> {
    let report = cancelling::refute_nn_candidate(&poly.inner)
        .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
    let out = PyDict::new(py);
    out.set_item("prime", report.p)?;
    out.set_item("refuted", report.refuted)?;
    out.set_item(
        "violations",
        report
            .scan
            .violations
            .iter()
            .map(|v| (v.a, v.b, v.value))
            .collect::<Vec<_>>(),
    )?;
    Ok(out)
}

/// Observed vs predicted lengths of maximal runs of Catalan numbers
/// divisible by p.
#[pyfunction]
fn catalan_blocks(p: u64, count: u64) -> PyResult<Vec<(u64, u64, u64, u64)>> {
    let report = modular::catalan_blocks(p, count)
        .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
    Ok(report
        .blocks
        .iter()
        .map(|b| (b.index, b.start, b.observed_len, b.predicted_len))
        .collect())
}

/// Evaluate a quantifier-fragment s-expression on the length-n word.
#[pyfunction]
fn wmso_eval(expr: &str, n: u64) -> PyResult<Rat> {
    let e = dsl::parse_wmso(expr, 1)
        .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
    e.validate()
        .map_err(|e| PyValueError::new_err(format!("[{}] {e}", e.name())))?;
    Ok(e.eval(n))
}

/// Parse and evaluate any sequence document at one index.
#[pyfunction]
fn eval_doc(text: &str, n: u64) -> PyResult<Rat> {
    PySequence::new(text)?.eval(n)
}

#[pymodule]
fn polyrec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoly>()?;
    m.add_class::<PySequence>()?;
    m.add_function(wrap_pyfunction!(nn_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(nn_refute, m)?)?;
    m.add_function(wrap_pyfunction!(catalan_blocks, m)?)?;
    m.add_function(wrap_pyfunction!(wmso_eval, m)?)?;
    m.add_function(wrap_pyfunction!(eval_doc, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
