//! Python bindings: `pysrdi.Tree`, `pysrdi.Report` and the solver functions.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use srd_interdiction::cit::solve_cit_report;
use srd_interdiction::dit::{solve_dit_traced, DitOptions};
use srd_interdiction::greedy::solve_dit_n1;
use srd_interdiction::mcdit::{solve_mcdit_traced, McditOptions};
use srd_interdiction::oracle;
use srd_interdiction::relax::solve_dit_inf;
use srd_interdiction::report::Problem;
use srd_interdiction::toolkit::format::{oracle_to_json, FormatError};
use srd_interdiction::toolkit::{gen_instance, instance_to_json, parse_instance, report_to_json, InstanceFamily};
use srd_interdiction::tree::{self, TreeInstance};
use srd_interdiction::{Error, SolveReport, Status};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn map_err(e: Error) -> PyErr {
    value_err(e)
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(value_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// A rooted tree with edge attributes `(w, u, c, r)` and parameters `M, K, N, D`.
#[pyclass(name = "Tree", module = "pysrdi", frozen)]
struct PyTree {
    inner: TreeInstance,
}

#[pymethods]
impl PyTree {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_instance(text).map(|inner| PyTree { inner }).map_err(|e: FormatError| value_err(e))
    }

    /// Random instance; `family` is "integer", "real" or "single".
    #[staticmethod]
    #[pyo3(signature = (n, seed, family = "integer", budget = None))]
    fn generate(n: usize, seed: u64, family: &str, budget: Option<u32>) -> PyResult<Self> {
        let mut f = match family {
            "integer" => InstanceFamily::integer(n, seed),
            "real" => InstanceFamily::real(n, seed),
            "single" => InstanceFamily::single_upgrade(n, seed),
            other => return Err(value_err(format!("unknown family {other:?}"))),
        };
        if budget.is_some() {
            f.rules.fixed_budget = budget;
        }
        gen_instance(&f).map(|inner| PyTree { inner }).map_err(map_err)
    }

    fn to_json(&self) -> String {
        instance_to_json(&self.inner)
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Leaves as external node ids.
    #[getter]
    fn leaves(&self) -> Vec<u64> {
        self.inner.leaves().into_iter().map(|v| self.inner.labels()[v]).collect()
    }

    #[getter]
    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = self.inner.params();
        let d = PyDict::new(py);
        d.set_item("M", p.m)?;
        d.set_item("K", p.k)?;
        d.set_item("N", p.n)?;
        d.set_item("D", p.d)?;
        Ok(d)
    }

    /// Copy with new parameters; omitted ones are kept.
    #[pyo3(signature = (m = None, k = None, n = None, d = None))]
    fn with_params(&self, m: Option<f64>, k: Option<f64>, n: Option<u32>, d: Option<f64>) -> PyResult<Self> {
        let mut p = *self.inner.params();
        p.m = m.unwrap_or(p.m);
        p.k = k.unwrap_or(p.k);
        p.n = n.unwrap_or(p.n);
        p.d = d.unwrap_or(p.d);
        self.inner.with_params(p).map(|inner| PyTree { inner }).map_err(map_err)
    }

    /// Sum of root-leaf distances under the original weights.
    fn srd(&self) -> f64 {
        tree::srd(&self.inner, &self.inner.weights())
    }

    /// Shortest root-leaf distance under the original weights.
    fn shortest_path(&self) -> f64 {
        tree::shortest_leaf(&self.inner, &self.inner.weights()).1
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params();
        format!("Tree(edges={}, M={}, K={}, N={}, D={})", self.inner.edge_count(), p.m, p.k, p.n, p.d)
    }
}

/// Result of a solver run.
#[pyclass(name = "Report", module = "pysrdi", frozen)]
struct PyReport {
    json: serde_json::Value,
    report: SolveReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn problem(&self) -> &'static str {
        self.report.problem.name()
    }

    #[getter]
    fn status(&self) -> &'static str {
        match self.report.status {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
        }
    }

    #[getter]
    fn feasible(&self) -> bool {
        self.report.is_feasible()
    }

    #[getter]
    fn objective(&self) -> Option<f64> {
        self.report.objective
    }

    #[getter]
    fn lambda_star(&self) -> Option<f64> {
        self.report.lambda_star
    }

    #[getter]
    fn k_star(&self) -> Option<f64> {
        self.report.k_star
    }

    #[getter]
    fn cit_calls(&self) -> usize {
        self.report.cit_calls
    }

    #[getter]
    fn dit_calls(&self) -> usize {
        self.report.dit_calls
    }

    /// Upgraded edges, named by child node id.
    #[getter]
    fn upgrades(&self) -> Vec<u64> {
        self.json["upgrades"].as_array().into_iter().flatten().filter_map(|v| v.as_u64()).collect()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_to_py(py, &self.json)
    }

    fn __repr__(&self) -> String {
        format!("Report(problem={:?}, status={:?}, objective={:?})", self.problem(), self.status(), self.report.objective)
    }
}

fn wrap(t: &TreeInstance, report: SolveReport) -> PyReport {
    PyReport { json: report_to_json(t, &report), report }
}

/// Solves `problem` in {"relax", "dit1", "cit", "dit", "mcdit"}.
#[pyfunction]
#[pyo3(signature = (tree, problem, lam = 0.5, strict = false, refine_real = false))]
fn solve(py: Python<'_>, tree: &PyTree, problem: &str, lam: f64, strict: bool, refine_real: bool) -> PyResult<PyReport> {
    let t = &tree.inner;
    let dit = DitOptions { strict_acceptance: strict, early_exit: false };
    let report = py.detach(|| match problem {
        "relax" => solve_dit_inf(t, t.params().k),
        "dit1" => solve_dit_n1(t),
        "cit" => solve_cit_report(t, lam),
        "dit" => solve_dit_traced(t, dit).map(|o| o.report),
        "mcdit" => solve_mcdit_traced(t, McditOptions { refine_real, dit }).map(|o| o.report),
        other => Err(Error::Precondition(format!("unknown problem {other:?}"))),
    });
    Ok(wrap(t, report.map_err(map_err)?))
}

/// Exhaustive optimum for `problem` in {"cit", "dit", "dit1", "mcdit"}; at most 16 edges.
#[pyfunction]
#[pyo3(signature = (tree, problem, lam = 0.5))]
fn brute_force(py: Python<'_>, tree: &PyTree, problem: &str, lam: f64) -> PyResult<Py<PyAny>> {
    let t = &tree.inner;
    let p = *t.params();
    let (kind, res) = match problem {
        "cit" => (Problem::Cit, oracle::oracle_cit(t, p.k, u64::from(p.n), lam)),
        "dit" => (Problem::Dit, oracle::oracle_dit(t)),
        "dit1" => (Problem::Dit1, oracle::oracle_single_edge(t)),
        "mcdit" => (Problem::Mcdit, oracle::oracle_mcdit(t)),
        other => return Err(value_err(format!("unknown problem {other:?}"))),
    };
    json_to_py(py, &oracle_to_json(t, kind, &res.map_err(map_err)?))
}

#[pymodule]
fn pysrdi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    Ok(())
}
