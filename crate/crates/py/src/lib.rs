//! Python bindings: `Field`, `Curve` and `Isogeny` classes plus the
//! query commands, whose results come back as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use volcano_cli::commands;
use volcano_cli::crosscheck;
use volcano_sha::ec::{self, frobenius_matrix, group_structure};
use volcano_sha::gf;
use volcano_sha::isog::{self, rational_kernels, velu};
use volcano_sha::Error;

fn py_err(e: Error) -> PyErr {
    match commands::exit_code(&e) {
        1 => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serialize through JSON into Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(frozen, skip_from_py_object, module = "volcano_py")]
#[derive(Clone)]
pub struct Field {
    inner: gf::Field,
}

#[pymethods]
impl Field {
    #[new]
    #[pyo3(signature = (p, n = 1))]
    fn new(p: u64, n: usize) -> PyResult<Self> {
        Ok(Field { inner: gf::Field::new(p, n).map_err(py_err)? })
    }

    #[getter]
    fn characteristic(&self) -> u64 {
        self.inner.characteristic()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn order(&self) -> Option<u64> {
        self.inner.order()
    }

    /// `{t: [[a, b], ...]}` over every trace, ordinary or not.
    fn isogeny_classes<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let table = ec::enumerate_classes(&self.inner).map_err(py_err)?;
        let k = &self.inner;
        let map: std::collections::BTreeMap<String, Vec<[u64; 2]>> = table
            .traces()
            .map(|t| {
                let curves = table.class(t).iter().map(|c| [k.index(c.a()) as u64, k.index(c.b()) as u64]).collect();
                (t.to_string(), curves)
            })
            .collect();
        to_py(py, &map)
    }

    fn __repr__(&self) -> String {
        format!("Field({}, {})", self.inner.characteristic(), self.inner.degree())
    }
}

#[pyclass(frozen, eq, skip_from_py_object, module = "volcano_py")]
#[derive(Clone, PartialEq)]
pub struct Curve {
    inner: ec::Curve,
}

#[pymethods]
impl Curve {
    /// `Curve(field, a, b)` with coefficient encodings, or `Curve.parse("p[,n];a,b")`.
    #[new]
    fn new(field: &Field, a: u64, b: u64) -> PyResult<Self> {
        let k = &field.inner;
        let q = k.order().unwrap_or(u64::MAX);
        if a >= q || b >= q {
            return Err(PyValueError::new_err("coefficient encodings must lie in [0, q)"));
        }
        let inner = ec::Curve::new(k, k.from_index(a as u128), k.from_index(b as u128)).map_err(py_err)?;
        Ok(Curve { inner })
    }

    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        Ok(Curve { inner: volcano_cli::spec::parse_curve(spec).map_err(py_err)? })
    }

    #[getter]
    fn field(&self) -> Field {
        Field { inner: self.inner.field().clone() }
    }

    #[getter]
    fn a(&self) -> u64 {
        self.inner.field().index(self.inner.a()) as u64
    }

    #[getter]
    fn b(&self) -> u64 {
        self.inner.field().index(self.inner.b()) as u64
    }

    #[getter]
    fn order(&self) -> u64 {
        self.inner.order()
    }

    #[getter]
    fn trace(&self) -> i64 {
        self.inner.trace()
    }

    #[getter]
    fn j_invariant(&self) -> u64 {
        self.inner.field().index(self.inner.j_invariant()) as u64
    }

    fn is_ordinary(&self) -> bool {
        self.inner.is_ordinary()
    }

    /// `(n1, n2)` with `E(k) = Z/n1 x Z/n2`, `n1 | n2`.
    fn group_structure(&self) -> PyResult<(u64, u64)> {
        group_structure(&self.inner).map_err(py_err)
    }

    /// Frobenius action on a basis of `E[n]` as a 2x2 matrix mod n.
    fn frobenius_matrix(&self, n: u64) -> PyResult<[[u64; 2]; 2]> {
        Ok(frobenius_matrix(&self.inner, n).map_err(py_err)?.m)
    }

    /// Height in the l-volcano.
    fn height(&self, ell: u64) -> PyResult<u32> {
        volcano_sha::volcano::height(&self.inner, ell).map_err(py_err)
    }

    /// The normalized l-isogenies out of this curve, one per rational kernel.
    fn isogenies(&self, ell: u64) -> PyResult<Vec<Isogeny>> {
        rational_kernels(&self.inner, ell)
            .map_err(py_err)?
            .iter()
            .map(|k| Ok(Isogeny { inner: velu(&self.inner, k, ell).map_err(py_err)? }))
            .collect()
    }

    fn __repr__(&self) -> String {
        let k = self.inner.field();
        format!("Curve({}, {}; {}, {})", k.characteristic(), k.degree(), self.a(), self.b())
    }
}

#[pyclass(frozen, skip_from_py_object, module = "volcano_py")]
pub struct Isogeny {
    inner: isog::Isogeny,
}

#[pymethods]
impl Isogeny {
    #[getter]
    fn domain(&self) -> Curve {
        Curve { inner: self.inner.domain().clone() }
    }

    #[getter]
    fn codomain(&self) -> Curve {
        Curve { inner: self.inner.codomain().clone() }
    }

    #[getter]
    fn degree(&self) -> u64 {
        self.inner.degree()
    }

    /// Kernel polynomial coefficient encodings, constant term first.
    #[getter]
    fn kernel(&self) -> Vec<u64> {
        let k = self.inner.domain().field();
        self.inner.kernel_poly().coeffs().iter().map(|c| k.index(c) as u64).collect()
    }

    #[getter]
    fn rational_kernel_point(&self) -> bool {
        self.inner.rational_kernel_point()
    }

    fn __repr__(&self) -> String {
        format!("Isogeny({:?} -> {:?}, degree {})", self.domain().__repr__(), self.codomain().__repr__(), self.degree())
    }
}

#[pyfunction]
#[pyo3(signature = (p, n = 1, t = None))]
fn classes(py: Python<'_>, p: u64, n: usize, t: Option<i64>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &commands::classes(p, n, t).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (p, t, ell, n = 1))]
fn volcano(py: Python<'_>, p: u64, t: i64, ell: u64, n: usize) -> PyResult<Bound<'_, PyAny>> {
    let graphs = commands::volcano_graphs(p, n, t, ell).map_err(py_err)?;
    to_py(py, &commands::volcano_document(p, n, t, ell, &graphs))
}

#[pyfunction]
#[pyo3(signature = (p, t, ell, n = 1))]
fn volcano_dot(p: u64, t: i64, ell: u64, n: usize) -> PyResult<String> {
    Ok(commands::volcano_dot(&commands::volcano_graphs(p, n, t, ell).map_err(py_err)?))
}

#[pyfunction]
fn sha<'py>(py: Python<'py>, e: &Curve, f: &Curve) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &commands::sha(&e.inner, &f.inner).map_err(py_err)?)
}

#[pyfunction]
fn selmer<'py>(py: Python<'py>, e: &Curve, kernel: usize, ell: u64, f: &Curve) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &commands::selmer(&e.inner, kernel, ell, &f.inner).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (p_max, ells, descent_p_max = crosscheck::DEFAULT_DESCENT_P_MAX))]
fn run_crosscheck(py: Python<'_>, p_max: u64, ells: Vec<u64>, descent_p_max: u64) -> PyResult<Bound<'_, PyAny>> {
    let cfg = crosscheck::Config { descent_p_max, ..crosscheck::Config::new(p_max, ells) };
    let out = py.detach(|| crosscheck::run(&cfg)).map_err(py_err)?;
    to_py(py, &out)
}

#[pymodule]
pub fn volcano_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Curve>()?;
    m.add_class::<Isogeny>()?;
    m.add_function(wrap_pyfunction!(classes, m)?)?;
    m.add_function(wrap_pyfunction!(volcano, m)?)?;
    m.add_function(wrap_pyfunction!(volcano_dot, m)?)?;
    m.add_function(wrap_pyfunction!(sha, m)?)?;
    m.add_function(wrap_pyfunction!(selmer, m)?)?;
    m.add_function(wrap_pyfunction!(run_crosscheck, m)?)?;
    Ok(())
}
