//! Python bindings. Structured results cross the boundary as JSON text,
//! with the same schemas the command line prints.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pbes::axioms::{run_axiom_suite, Grid};
use pbes::cluster::{confusion_free_exact, confusion_free_static, Clusters};
use pbes::lposet::{language_leq, pomset_language};
use pbes::pbes::{configuration_tree, elaborate_pbes};
use pbes::sim::{
    check_equivalence, find_simulation, verify_witness, SearchOptions, SimWitness, Verdict,
};
use pbes::{parse_term, render_term, ConfigSpace};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn value(text: &str) -> PyResult<serde_json::Value> {
    serde_json::from_str(text).map_err(err)
}

/// A parsed term.
#[pyclass(name = "Term", frozen)]
struct PyTerm(pbes::Term);

#[pymethods]
impl PyTerm {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_term(text).map(PyTerm).map_err(err)
    }

    fn has_star(&self) -> bool {
        self.0.has_star()
    }

    fn has_pchoice(&self) -> bool {
        self.0.has_pchoice()
    }

    fn size(&self) -> usize {
        self.0.size()
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    /// Elaborates into a pBES; `depth` truncates Kleene stars.
    #[pyo3(signature = (depth=None))]
    fn elaborate(&self, depth: Option<usize>) -> PyResult<PyPbes> {
        elaborate_pbes(&self.0, depth).map(PyPbes).map_err(err)
    }

    fn __str__(&self) -> String {
        render_term(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Term({:?})", render_term(&self.0))
    }
}

/// A probabilistic bundle event structure.
#[pyclass(name = "Pbes", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPbes(pbes::pbes::Pbes);

#[pymethods]
impl PyPbes {
    #[staticmethod]
    #[pyo3(signature = (text, depth=None))]
    fn from_term(text: &str, depth: Option<usize>) -> PyResult<Self> {
        let t = parse_term(text).map_err(err)?;
        elaborate_pbes(&t, depth).map(PyPbes).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        pbes::pbes::Pbes::from_json(&value(text)?)
            .map(PyPbes)
            .map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    fn bes_json(&self) -> String {
        self.0.bes().to_json().to_string()
    }

    fn events(&self) -> Vec<String> {
        self.0
            .bes()
            .events()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn labels(&self) -> Vec<Option<String>> {
        (0..self.0.bes().len())
            .map(|i| self.0.bes().label(i).map(str::to_string))
            .collect()
    }

    /// Configurations as sorted lists of event ids, in discovery order.
    fn configurations(&self) -> Vec<Vec<String>> {
        let b = self.0.bes();
        ConfigSpace::new(b)
            .iter()
            .map(|x| b.ids_of(x).iter().map(ToString::to_string).collect())
            .collect()
    }

    fn clusters(&self) -> Vec<Vec<String>> {
        let b = self.0.bes();
        let space = ConfigSpace::new(b);
        Clusters::new(b, &space)
            .clusters()
            .iter()
            .map(|c| b.ids_of(c).iter().map(ToString::to_string).collect())
            .collect()
    }

    #[pyo3(signature = (static_check=false))]
    fn confusion_free(&self, static_check: bool) -> bool {
        let b = self.0.bes();
        let space = ConfigSpace::new(b);
        if static_check {
            confusion_free_static(b, &space)
        } else {
            confusion_free_exact(b, &space).is_ok()
        }
    }

    fn pomset_count(&self) -> usize {
        pomset_language(self.0.bes()).len()
    }

    fn tree_json(&self) -> String {
        configuration_tree(&self.0).to_json(&self.0).to_string()
    }

    fn tree_dot(&self) -> String {
        configuration_tree(&self.0).to_dot(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.bes().len()
    }
}

fn verdict_json(
    v: &Verdict,
    l: &pbes::pbes::Pbes,
    r: &pbes::pbes::Pbes,
    depth: Option<usize>,
) -> serde_json::Value {
    match v {
        Verdict::Holds(w) => {
            serde_json::json!({"verdict": "holds", "witness": w.to_json(l, r, depth)})
        }
        Verdict::NotFoundWithinSearchSpace(d) => {
            let b = l.bes();
            let sets = |xs: &[pbes::EventSet]| xs.iter().map(|x| b.ids_of(x)).collect::<Vec<_>>();
            serde_json::json!({
                "verdict": "not_found_within_search_space",
                "diagnostic": {"unmatched": sets(&d.unmatched), "emptied": sets(&d.emptied)},
            })
        }
    }
}

/// Canonical rendering of a term.
#[pyfunction]
fn render(text: &str) -> PyResult<String> {
    parse_term(text).map(|t| render_term(&t)).map_err(err)
}

/// Searches for a simulation of `lhs` by `rhs`; returns JSON.
#[pyfunction]
#[pyo3(signature = (lhs, rhs, depth=None))]
fn simulate(py: Python<'_>, lhs: &PyPbes, rhs: &PyPbes, depth: Option<usize>) -> PyResult<String> {
    let (l, r) = (lhs.0.clone(), rhs.0.clone());
    let v = py
        .detach(|| find_simulation(&l, &r, &SearchOptions::default()))
        .map_err(err)?;
    Ok(verdict_json(&v, &l, &r, depth).to_string())
}

#[pyfunction]
fn refines(py: Python<'_>, lhs: &PyPbes, rhs: &PyPbes) -> PyResult<bool> {
    let (l, r) = (lhs.0.clone(), rhs.0.clone());
    py.detach(|| find_simulation(&l, &r, &SearchOptions::default()))
        .map(|v| v.holds())
        .map_err(err)
}

#[pyfunction]
fn equivalent(py: Python<'_>, lhs: &PyPbes, rhs: &PyPbes) -> PyResult<bool> {
    let (l, r) = (lhs.0.clone(), rhs.0.clone());
    py.detach(|| check_equivalence(&l, &r, &SearchOptions::default()))
        .map(|e| e.holds())
        .map_err(err)
}

#[pyfunction]
fn language_leq_of(lhs: &PyPbes, rhs: &PyPbes) -> bool {
    language_leq(lhs.0.bes(), rhs.0.bes())
}

/// Checks a witness document as produced by `simulate`.
#[pyfunction]
fn verify(text: &str) -> PyResult<bool> {
    let doc = value(text)?;
    let side = |k: &str| -> PyResult<pbes::pbes::Pbes> {
        let v = doc
            .get(k)
            .ok_or_else(|| err(format!("witness without `{k}`")))?;
        pbes::pbes::Pbes::from_json(v).map_err(err)
    };
    let (l, r) = (side("lhs")?, side("rhs")?);
    let w = SimWitness::from_json(&doc, &l, &r).map_err(err)?;
    Ok(verify_witness(&l, &r, &w).map_err(err)?.is_ok())
}

/// Runs the axiom suite over a grid document; returns the JSON report.
#[pyfunction]
fn axioms(py: Python<'_>, grid: &str) -> PyResult<String> {
    let g = Grid::from_json(&value(grid)?).map_err(err)?;
    let report = py.detach(|| run_axiom_suite(&g)).map_err(err)?;
    Ok(report.to_json().to_string())
}

#[pymodule]
fn pypbes(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTerm>()?;
    m.add_class::<PyPbes>()?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(refines, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(language_leq_of, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(axioms, m)?)?;
    Ok(())
}
