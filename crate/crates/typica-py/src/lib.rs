//! Python bindings: the main types and operations of the inference engine.
//!
//! ```python
//! import typica_py as tp
//!
//! kb = tp.KnowledgeBase.builtin("yale")
//! run = kb.infer()
//! print(run.verdict("alive@3")["classification"])  # REFUTED
//! ```

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use std::sync::Arc;

use typica::engine::{self, KnowledgeState};
use typica::error::Error;
use typica::fuzzy;
use typica::kb;
use typica::trace;

fn to_py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite ordered universe of labels.
#[pyclass(name = "Universe", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyUniverse {
    inner: Arc<fuzzy::Universe>,
}

#[pymethods]
impl PyUniverse {
    #[new]
    fn new(name: &str, elements: Vec<String>) -> PyResult<Self> {
        Ok(PyUniverse {
            inner: fuzzy::Universe::new(name, elements).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn elements(&self) -> Vec<String> {
        self.inner.elements().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Universe({:?}, {:?})",
            self.inner.name(),
            self.inner.elements()
        )
    }
}

/// Membership grades in [0, 1] over a universe.
#[pyclass(name = "FuzzySet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFuzzySet {
    inner: fuzzy::FuzzySet,
}

fn grades_dict<'py>(py: Python<'py>, set: &fuzzy::FuzzySet) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (label, grade) in set.universe().elements().iter().zip(set.grades()) {
        d.set_item(label, *grade)?;
    }
    Ok(d)
}

#[pymethods]
impl PyFuzzySet {
    /// Build from `{label: grade}`; omitted labels get grade 0.
    #[new]
    fn new(universe: &PyUniverse, grades: std::collections::HashMap<String, f64>) -> PyResult<Self> {
        let pairs: Vec<(&str, f64)> = grades.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        Ok(PyFuzzySet {
            inner: fuzzy::FuzzySet::from_pairs(universe.inner.clone(), &pairs)
                .map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn empty(universe: &PyUniverse) -> Self {
        PyFuzzySet {
            inner: fuzzy::FuzzySet::empty(universe.inner.clone()),
        }
    }

    #[staticmethod]
    fn full(universe: &PyUniverse) -> Self {
        PyFuzzySet {
            inner: fuzzy::FuzzySet::full(universe.inner.clone()),
        }
    }

    #[staticmethod]
    fn singleton(universe: &PyUniverse, label: &str) -> PyResult<Self> {
        Ok(PyFuzzySet {
            inner: fuzzy::FuzzySet::singleton(universe.inner.clone(), label)
                .map_err(to_py_err)?,
        })
    }

    fn grades<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        grades_dict(py, &self.inner)
    }

    fn grade(&self, label: &str) -> Option<f64> {
        self.inner.grade(label)
    }

    fn intersect(&self, other: &PyFuzzySet) -> PyResult<Self> {
        Ok(PyFuzzySet {
            inner: self.inner.intersect(&other.inner).map_err(to_py_err)?,
        })
    }

    fn union(&self, other: &PyFuzzySet) -> PyResult<Self> {
        Ok(PyFuzzySet {
            inner: self.inner.union(&other.inner).map_err(to_py_err)?,
        })
    }

    fn complement(&self) -> Self {
        PyFuzzySet {
            inner: self.inner.complement(),
        }
    }

    /// Poss[self / other]: max over the universe of the pointwise min.
    fn possibility(&self, other: &PyFuzzySet) -> PyResult<f64> {
        self.inner.possibility(&other.inner).map_err(to_py_err)
    }

    /// 1 - Poss[not self / other].
    fn certainty(&self, other: &PyFuzzySet) -> PyResult<f64> {
        self.inner.certainty(&other.inner).map_err(to_py_err)
    }

    fn height(&self) -> f64 {
        self.inner.height()
    }

    fn is_normal(&self) -> bool {
        self.inner.is_normal()
    }

    fn is_crisp(&self) -> bool {
        self.inner.is_crisp()
    }

    fn __eq__(&self, other: &PyFuzzySet) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("FuzzySet({})", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// A parsed and validated rule base.
#[pyclass(name = "KnowledgeBase", frozen)]
struct PyKnowledgeBase {
    inner: kb::KnowledgeBase,
}

#[pymethods]
impl PyKnowledgeBase {
    /// Parse rule-base text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyKnowledgeBase {
            inner: typica::parser::parse_kb(text).map_err(to_py_err)?,
        })
    }

    /// One of: nixon, nixon-quaker-only, nixon-republican-only,
    /// nixon-both, yale.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PyKnowledgeBase {
            inner: kb::KnowledgeBase::builtin(name).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyValueError::new_err(format!("cannot read {path}: {e}")))?;
        Self::parse(&text)
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner
            .variables()
            .iter()
            .map(|v| v.name().to_string())
            .collect()
    }

    #[getter]
    fn facts(&self) -> Vec<String> {
        self.inner.facts().iter().map(|f| f.id.clone()).collect()
    }

    #[getter]
    fn defaults(&self) -> Vec<String> {
        self.inner.defaults().iter().map(|d| d.id.clone()).collect()
    }

    #[getter]
    fn queries(&self) -> Vec<String> {
        self.inner.queries().to_vec()
    }

    fn to_dsl(&self) -> String {
        self.inner.to_dsl()
    }

    /// Run inference and return the final state.
    #[pyo3(signature = (threshold=None))]
    fn infer(&self, threshold: Option<f64>) -> PyResult<PyInference> {
        let state = match threshold {
            None => engine::infer(&self.inner).map_err(to_py_err)?,
            Some(t) => {
                let mut kb = self.inner.clone();
                let options = kb::Options {
                    threshold: t,
                    ..kb.options().clone()
                };
                kb.set_options(options).map_err(to_py_err)?;
                engine::infer(&kb).map_err(to_py_err)?
            }
        };
        Ok(PyInference { state })
    }

    fn __repr__(&self) -> String {
        format!(
            "KnowledgeBase(variables={}, facts={}, defaults={})",
            self.inner.variables().len(),
            self.inner.facts().len(),
            self.inner.defaults().len()
        )
    }
}

/// The immutable result of an inference run.
#[pyclass(name = "Inference", frozen)]
struct PyInference {
    state: KnowledgeState,
}

#[pymethods]
impl PyInference {
    /// Schedule layers as lists of identifiers; layer 0 is the facts.
    fn schedule(&self) -> Vec<Vec<String>> {
        self.state.schedule().layers().to_vec()
    }

    fn consistent(&self) -> bool {
        self.state.is_consistent()
    }

    fn height(&self) -> f64 {
        self.state.h().height()
    }

    /// Project the final knowledge onto a variable.
    fn project(&self, variable: &str) -> PyResult<PyFuzzySet> {
        Ok(PyFuzzySet {
            inner: self.state.h().project_set(variable).map_err(to_py_err)?,
        })
    }

    /// Verdict for a variable: classification, projected set, and
    /// possibility/certainty grades per query set.
    #[pyo3(signature = (variable, set=None))]
    fn verdict<'py>(
        &self,
        py: Python<'py>,
        variable: &str,
        set: Option<PyRef<'py, PyFuzzySet>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let q = set.as_ref().map(|s| &s.inner);
        let v = engine::query(&self.state, variable, q).map_err(to_py_err)?;
        let out = PyDict::new(py);
        out.set_item("variable", &v.variable)?;
        out.set_item("classification", v.classification.to_string())?;
        out.set_item("projected", grades_dict(py, &v.projected)?)?;
        let entries = PyList::empty(py);
        for e in &v.entries {
            let entry = PyDict::new(py);
            if let Some(label) = &e.label {
                entry.set_item("label", label)?;
            }
            entry.set_item("set", e.set.to_string())?;
            entry.set_item("possibility", e.possibility)?;
            entry.set_item("certainty", e.certainty)?;
            entry.set_item("classification", e.classification.to_string())?;
            entries.append(entry)?;
        }
        out.set_item("entries", entries)?;
        out.set_item("height", v.kb_height)?;
        Ok(out)
    }

    /// The rendered inference trace.
    fn trace(&self) -> String {
        trace::render_trace(&self.state)
    }

    /// Re-derive effecting steps through the power-set oracle; returns
    /// `(steps_checked, mismatches)`.
    fn oracle_check(&self) -> PyResult<(usize, Vec<String>)> {
        let report = trace::oracle_check(&self.state).map_err(to_py_err)?;
        Ok((report.checked, report.mismatches))
    }

    fn __repr__(&self) -> String {
        format!(
            "Inference(layers={}, height={}, consistent={})",
            self.state.trace().len(),
            self.state.h().height(),
            self.state.is_consistent()
        )
    }
}

/// `D(x) = (h(x) ∧ (1 - Poss[a/h])) ∨ (a(x) ∧ h(x))`.
#[pyfunction]
fn apply_default(h: &PyFuzzySet, a: &PyFuzzySet) -> PyResult<PyFuzzySet> {
    Ok(PyFuzzySet {
        inner: engine::apply_default(&h.inner, &a.inner).map_err(to_py_err)?,
    })
}

/// The same combination computed through the power-set path.
#[pyfunction]
fn default_combine_oracle(a: &PyFuzzySet, b: &PyFuzzySet) -> PyResult<PyFuzzySet> {
    Ok(PyFuzzySet {
        inner: typica::second_order::default_combine_oracle(&a.inner, &b.inner)
            .map_err(to_py_err)?,
    })
}

#[pyfunction]
fn builtin_names() -> Vec<&'static str> {
    kb::KnowledgeBase::BUILTIN_NAMES.to_vec()
}

#[pymodule]
fn typica_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyUniverse>()?;
    m.add_class::<PyFuzzySet>()?;
    m.add_class::<PyKnowledgeBase>()?;
    m.add_class::<PyInference>()?;
    m.add_function(wrap_pyfunction!(apply_default, m)?)?;
    m.add_function(wrap_pyfunction!(default_combine_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    Ok(())
}
