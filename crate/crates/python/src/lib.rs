//! Python module `pyhypergame`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hypergame::dialogue::Mode;
use hypergame::semantics::{self, DEFAULT_BUDGET};
use hypergame::{Error, ImportUniverse, Strategy, Term, TransitionSystem, TypeExpr};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "f" => Ok(Mode::BlackBox),
        "lambda" => Ok(Mode::PBacktracking),
        _ => Err(PyValueError::new_err(format!("unknown mode `{mode}`; use `lambda` or `f`"))),
    }
}

#[pyclass(name = "Type", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyType(TypeExpr);

#[pymethods]
impl PyType {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        TypeExpr::parse(text).map(PyType).map_err(to_py)
    }

    fn prenex(&self) -> Self {
        PyType(self.0.prenex())
    }

    fn is_prenex(&self) -> bool {
        self.0.is_prenex()
    }

    fn free_vars(&self) -> Vec<String> {
        self.0.free_vars().iter().map(|n| n.to_string()).collect()
    }

    fn available_quantifiers(&self) -> Vec<String> {
        self.0.available_quantifiers().iter().map(|n| n.to_string()).collect()
    }

    fn import_lazy(&self, value: &PyType) -> PyResult<Self> {
        self.0.import_lazy(&value.0).map(PyType).map_err(to_py)
    }

    fn substitute(&self, name: &str, value: &PyType) -> Self {
        PyType(self.0.substitute(name, &value.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Type({:?})", self.0.to_string())
    }
}

#[pyclass(name = "Term", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTerm(Term);

#[pymethods]
impl PyTerm {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Term::parse(text).map(PyTerm).map_err(to_py)
    }

    fn typecheck(&self) -> PyResult<PyType> {
        hypergame::typecheck(&[], &self.0).map(PyType).map_err(to_py)
    }

    fn normalize(&self) -> PyResult<Self> {
        semantics::normalize_syntactically(&self.0).map(PyTerm).map_err(to_py)
    }

    #[pyo3(signature = (budget = DEFAULT_BUDGET))]
    fn normalize_via_games(&self, budget: usize) -> PyResult<Self> {
        semantics::normalize::normalize_via_games_with_budget(&self.0, budget).map(PyTerm).map_err(to_py)
    }

    fn alpha_eq(&self, other: &PyTerm) -> bool {
        self.0.alpha_eq(&other.0)
    }

    fn size(&self) -> usize {
        self.0.size()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Term({:?})", self.0.to_string())
    }
}

#[pyclass(name = "Strategy", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyStrategy(Strategy);

#[pymethods]
impl PyStrategy {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Strategy::parse(text).map(PyStrategy).map_err(to_py)
    }

    /// Maximal plays as lists of `(back_ref, branch)` pairs.
    fn plays(&self) -> Vec<Vec<(usize, usize)>> {
        self.0.maximal_plays().iter().map(|p| p.erase()).collect()
    }

    fn depth(&self) -> usize {
        self.0.depth()
    }

    #[pyo3(signature = (ty, mode = "f"))]
    fn validate(&self, ty: &PyType, mode: &str) -> PyResult<()> {
        self.0.validate(&TransitionSystem::build(ty.0.clone()), parse_mode(mode)?).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn __str__(&self) -> String {
        self.0.to_text()
    }
}

#[pyfunction]
fn compile(term: &PyTerm, ty: &PyType) -> PyResult<PyStrategy> {
    semantics::term_to_strategy(&term.0, &ty.0).map(PyStrategy).map_err(to_py)
}

#[pyfunction]
fn readback(strategy: &PyStrategy, ty: &PyType) -> PyResult<PyTerm> {
    semantics::strategy_to_term(&strategy.0, &ty.0).map(PyTerm).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (ty, depth, mode = "f", copycat = true))]
fn strategies(ty: &PyType, depth: usize, mode: &str, copycat: bool) -> PyResult<Vec<PyStrategy>> {
    let ts = TransitionSystem::build(ty.0.clone());
    let found = hypergame::enumerate_strategies(&ts, parse_mode(mode)?, depth, &ImportUniverse::default(), copycat);
    Ok(found.into_iter().map(PyStrategy).collect())
}

/// `(terms, strategies, ok)` for the bounded bijection check.
#[pyfunction]
#[pyo3(signature = (ty, term_size = 12, depth = 10, mode = "f"))]
fn check(ty: &PyType, term_size: usize, depth: usize, mode: &str) -> PyResult<(usize, usize, bool)> {
    let r = semantics::check_bijection(&ty.0, term_size, depth, parse_mode(mode)?, &ImportUniverse::default());
    Ok((r.terms, r.strategies, r.ok()))
}

#[pymodule]
fn pyhypergame(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyType>()?;
    m.add_class::<PyTerm>()?;
    m.add_class::<PyStrategy>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(readback, m)?)?;
    m.add_function(wrap_pyfunction!(strategies, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}
