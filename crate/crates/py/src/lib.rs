//! Python bindings: schemas, instances and monad tags, plus the checkers
//! and machines that run on them. Every core error surfaces as `ValueError`.

use std::fmt::Display;
use std::fs;
use std::sync::Arc;

use kleisli_core::dynamics::{self, RunOutcome, Tape};
use kleisli_core::instance::Instance as CoreInstance;
use kleisli_core::laws::{check_monad_laws, LawReport};
use kleisli_core::monad::MonadTag as CoreTag;
use kleisli_core::morphism::InstanceMorphism;
use kleisli_core::rational::render_rational;
use kleisli_core::schema::Schema as CoreSchema;
use kleisli_core::transform::{self, check_monad_morphism_laws, MonadMorphism, Mutant};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn report(r: LawReport) -> (bool, String) {
    (r.passed(), r.to_string())
}

#[pyclass(module = "kleisli_db", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Schema {
    inner: Arc<CoreSchema>,
}

#[pymethods]
impl Schema {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Schema { inner: Arc::new(CoreSchema::parse(text).map_err(err)?) })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    fn objects(&self) -> Vec<String> {
        self.inner.objects().to_vec()
    }

    fn arrows(&self) -> Vec<(String, String, String)> {
        self.inner.arrows().iter().map(|a| (a.name.clone(), a.src.clone(), a.dst.clone())).collect()
    }

    fn opposite(&self) -> Schema {
        Schema { inner: Arc::new(self.inner.opposite()) }
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!("<Schema {}>", self.inner.name)
    }
}

#[pyclass(module = "kleisli_db", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct MonadTag {
    inner: CoreTag,
}

#[pymethods]
impl MonadTag {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(MonadTag { inner: text.parse().map_err(err)? })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    /// Parses and re-renders a value in canonical form.
    fn canonical(&self, value: &str) -> PyResult<String> {
        let v = self.inner.parse_value(value).map_err(err)?;
        self.inner.render(&v).map_err(err)
    }

    fn values_eq(&self, a: &str, b: &str) -> PyResult<bool> {
        let a = self.inner.parse_value(a).map_err(err)?;
        let b = self.inner.parse_value(b).map_err(err)?;
        self.inner.values_eq(&a, &b).map_err(err)
    }

    #[pyo3(signature = (cases = 500, seed = 42))]
    fn check_laws(&self, cases: usize, seed: u64) -> (bool, String) {
        report(check_monad_laws(&self.inner, cases, seed))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("<MonadTag {}>", self.inner)
    }
}

#[pyclass(module = "kleisli_db", frozen)]
pub struct RunResult {
    /// `halted`, `returned` or `timeout`
    #[pyo3(get)]
    kind: String,
    #[pyo3(get)]
    steps: usize,
    #[pyo3(get)]
    label: Option<String>,
    #[pyo3(get)]
    ones: Option<Vec<i64>>,
    #[pyo3(get)]
    head: Option<i64>,
}

impl From<RunOutcome> for RunResult {
    fn from(o: RunOutcome) -> Self {
        let empty = |kind: &str, steps| RunResult { kind: kind.into(), steps, label: None, ones: None, head: None };
        match o {
            RunOutcome::Halted { tape, steps } => RunResult {
                ones: Some(tape.ones().iter().copied().collect()),
                head: Some(tape.head()),
                ..empty("halted", steps)
            },
            RunOutcome::Returned { label, steps } => RunResult { label: Some(label), ..empty("returned", steps) },
            RunOutcome::Timeout { steps } => empty("timeout", steps),
        }
    }
}

#[pymethods]
impl RunResult {
    fn __repr__(&self) -> String {
        match (&self.label, &self.ones) {
            (Some(l), _) => format!("<RunResult returned !{l} after {}>", self.steps),
            (_, Some(o)) => format!("<RunResult halted after {}: ones {o:?} head {}>", self.steps, self.head.unwrap()),
            _ => format!("<RunResult timeout after {}>", self.steps),
        }
    }
}

#[pyclass(module = "kleisli_db", frozen)]
pub struct Instance {
    inner: CoreInstance,
}

impl Instance {
    fn wrap(inner: CoreInstance) -> Self {
        Instance { inner }
    }

    fn render_value(&self, v: &kleisli_core::monad::TValue) -> PyResult<String> {
        self.inner.tag().render(v).map_err(err)
    }
}

#[pymethods]
impl Instance {
    /// Parses an instance. Missing cells and dangling references raise unless
    /// `check=False`; path equivalences are reported by `violations`.
    #[new]
    #[pyo3(signature = (schema, text, check = true))]
    fn new(schema: &Schema, text: &str, check: bool) -> PyResult<Self> {
        let parse = if check { CoreInstance::parse } else { CoreInstance::parse_unchecked };
        parse(schema.inner.clone(), text).map(Instance::wrap).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn tag(&self) -> MonadTag {
        MonadTag { inner: self.inner.tag().clone() }
    }

    #[getter]
    fn schema(&self) -> Schema {
        Schema { inner: self.inner.schema_arc() }
    }

    fn rows(&self, obj: &str) -> Vec<String> {
        self.inner.rows(obj).cloned().collect()
    }

    fn cell(&self, arrow: &str, id: &str) -> PyResult<Option<String>> {
        self.inner.cell(arrow, id).map(|v| self.render_value(v)).transpose()
    }

    fn violations(&self) -> Vec<String> {
        self.inner.validate().violations.iter().map(ToString::to_string).collect()
    }

    fn is_valid(&self) -> bool {
        self.inner.validate().is_valid()
    }

    fn eval(&self, path: &str, id: &str) -> PyResult<String> {
        let path = self.inner.schema().parse_path(path).map_err(err)?;
        self.render_value(&self.inner.eval_path(&path, id).map_err(err)?)
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn invert(&self) -> PyResult<Instance> {
        self.inner.invert().map(Instance::wrap).map_err(err)
    }

    /// Changes the monad along a named morphism, as for `kleisli transform --via`.
    fn transform(&self, via: &str) -> PyResult<Instance> {
        let mm = MonadMorphism::from_cli(via, self.inner.tag(), |p| fs::read_to_string(p).map_err(|e| e.to_string()))
            .map_err(err)?;
        transform::transform_instance(&self.inner, &mm).map(Instance::wrap).map_err(err)
    }

    fn iterate(&self, id: &str, steps: usize) -> PyResult<String> {
        self.render_value(&dynamics::iterate(&self.inner, id, steps).map_err(err)?)
    }

    /// States and the row-stochastic matrix, entries as exact fraction strings.
    fn markov_matrix(&self) -> PyResult<(Vec<String>, Vec<Vec<String>>)> {
        let (states, m) = dynamics::markov_matrix(&self.inner).map_err(err)?;
        Ok((states, m.iter().map(|row| row.iter().map(render_rational).collect()).collect()))
    }

    fn run_fsa(&self, id: &str, word: Vec<String>) -> PyResult<String> {
        dynamics::run_fsa(&self.inner, id, &word).map_err(err)
    }

    #[pyo3(signature = (id = "Start", tape = "", head = 0, max_steps = 10_000))]
    fn run_turing(&self, id: &str, tape: &str, head: i64, max_steps: usize) -> PyResult<RunResult> {
        let tape = Tape::from_bits(tape, head).map_err(err)?;
        Ok(dynamics::run_turing(&self.inner, id, tape, max_steps).map_err(err)?.into())
    }

    #[pyo3(signature = (id, max_steps = 10_000))]
    fn run_recursive(&self, id: &str, max_steps: usize) -> PyResult<RunResult> {
        Ok(dynamics::run_recursive(&self.inner, id, max_steps).map_err(err)?.into())
    }

    fn export_dot(&self) -> PyResult<String> {
        dynamics::export_dot(&self.inner).map_err(err)
    }

    fn schema_of(&self) -> PyResult<Schema> {
        Ok(Schema { inner: Arc::new(dynamics::instance_to_schema(&self.inner).map_err(err)?) })
    }

    fn __repr__(&self) -> String {
        format!("<Instance {} over {} in {}>", self.inner.name, self.inner.schema().name, self.inner.tag())
    }
}

/// Checks a morphism file against two instances; returns `(passed, report)`.
#[pyfunction]
fn check_morphism(src: &Instance, dst: &Instance, text: &str) -> PyResult<(bool, String)> {
    let m = InstanceMorphism::parse(text, &src.inner, &dst.inner).map_err(err)?;
    let r = m.check(&src.inner, &dst.inner).map_err(err)?;
    Ok((r.passed(), r.to_string()))
}

/// Checks the monad morphism laws for a catalog name or a `mutant-*` name.
#[pyfunction]
#[pyo3(signature = (name, cases = 500, seed = 42))]
fn morphism_laws(name: &str, cases: usize, seed: u64) -> PyResult<(bool, String)> {
    let r = match name {
        "mutant-last-or-null" => check_monad_morphism_laws(&Mutant::LastOrNull, cases, seed),
        "mutant-dedup-forget-order" => check_monad_morphism_laws(&Mutant::DedupForgetOrder, cases, seed),
        "mutant-constant-null" => check_monad_morphism_laws(&Mutant::ConstantNull, cases, seed),
        _ => {
            let mm = MonadMorphism::from_cli(name, &CoreTag::Atomic, |p| fs::read_to_string(p).map_err(|e| e.to_string()))
                .map_err(err)?;
            check_monad_morphism_laws(&mm, cases, seed)
        }
    };
    Ok(report(r))
}

/// Searches for a witness that tape evaluation breaks the multiplication square.
#[pyfunction]
#[pyo3(signature = (cases = 500, seed = 42))]
fn tape_eval_witness(cases: usize, seed: u64) -> PyResult<(bool, String)> {
    let r = dynamics::check_tape_eval_not_monad_morphism(cases, seed).map_err(err)?;
    Ok((r.confirmed(), r.to_string()))
}

#[pyfunction]
fn factorial_instance(max_n: u32) -> PyResult<Instance> {
    dynamics::factorial_instance(max_n).map(Instance::wrap).map_err(err)
}

#[pymodule]
fn kleisli_db(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Schema>()?;
    m.add_class::<MonadTag>()?;
    m.add_class::<Instance>()?;
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(check_morphism, m)?)?;
    m.add_function(wrap_pyfunction!(morphism_laws, m)?)?;
    m.add_function(wrap_pyfunction!(tape_eval_witness, m)?)?;
    m.add_function(wrap_pyfunction!(factorial_instance, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use kleisli_core::fixtures;

    #[test]
    fn outcomes_convert() {
        let r: RunResult = RunOutcome::Returned { label: "120".into(), steps: 6 }.into();
        assert_eq!((r.kind.as_str(), r.label.as_deref(), r.steps), ("returned", Some("120"), 6));
        let r: RunResult = RunOutcome::Halted { tape: Tape::new([-1, 0], -1), steps: 5 }.into();
        assert_eq!((r.ones, r.head), (Some(vec![-1, 0]), Some(-1)));
        assert_eq!(RunResult::from(RunOutcome::Timeout { steps: 3 }).kind, "timeout");
    }

    #[test]
    fn wrappers_delegate() {
        let inst = Instance::wrap(fixtures::load("markov"));
        assert_eq!(inst.eval("s.f.f", "3").unwrap(), "14/25 1 + 7/20 2 + 9/100 3");
        assert_eq!(inst.transform("support").unwrap().tag().kind(), "powerset");
        assert!(inst.export_dot().is_err());
    }
}
