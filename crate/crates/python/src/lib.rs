//! Python module `sfett`.
//!
//! Dense tensors cross the boundary as flat lists in first-index-fastest
//! order together with their dims (`numpy.ravel(order="F")` on the Python
//! side).

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sfett_cli::{cmd_approx, cmd_eigs, io, ApproxConfig, EigsConfig, FuncKind, OpKind};
use sfett_core::problems::{laplace_min_eig as laplace_min_eig_impl, HENON_LAMBDA};
use sfett_core::tangent::manifold_dim as manifold_dim_impl;
use sfett_core::{rstgd as rstgd_impl, DenseTensor, Error, RstgdOptions, SfEttRank, SfEttTensor, Target};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

type RankTuple = (Vec<usize>, Vec<usize>, usize);

fn rank(r: RankTuple) -> SfEttRank {
    SfEttRank::new(r.0, r.1, r.2)
}

fn dense(data: Vec<f64>, dims: Vec<usize>) -> PyResult<DenseTensor> {
    DenseTensor::new(dims, data).map_err(to_py)
}

/// SF-ETT tensor: a TT core with one Tucker factor per leading mode and one
/// factor shared by the trailing modes.
#[pyclass(name = "SfEtt", module = "sfett", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySfEtt {
    inner: SfEttTensor,
}

#[pymethods]
impl PySfEtt {
    /// Seeded random tensor with orthonormal factors and unit norm.
    #[staticmethod]
    #[pyo3(signature = (dims, d_t, ranks, seed=0))]
    fn random(dims: Vec<usize>, d_t: usize, ranks: RankTuple, seed: u64) -> PyResult<Self> {
        let inner = SfEttTensor::random(&dims, d_t, &rank(ranks), seed).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Truncated decomposition of a dense tensor.
    #[staticmethod]
    fn from_dense(data: Vec<f64>, dims: Vec<usize>, d_t: usize, ranks: RankTuple) -> PyResult<Self> {
        let a = dense(data, dims)?;
        let inner = SfEttTensor::svd_from_dense(&a, d_t, &rank(ranks)).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self { inner: io::load(path).map_err(to_py)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        io::save(path, &self.inner).map_err(to_py)
    }

    fn to_bytes(&self) -> Vec<u8> {
        io::encode(&self.inner)
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Ok(Self { inner: io::decode(data).map_err(to_py)? })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims()
    }

    #[getter]
    fn d_t(&self) -> usize {
        self.inner.d_t()
    }

    /// `(tt_ranks, tucker_ranks, shared_rank)`.
    #[getter]
    fn ranks(&self) -> RankTuple {
        let r = self.inner.ranks();
        (r.tt, r.tucker, r.shared)
    }

    #[getter]
    fn param_count(&self) -> usize {
        self.inner.param_count()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn inner(&self, other: &PySfEtt) -> PyResult<f64> {
        self.inner.inner(&other.inner).map_err(to_py)
    }

    fn __add__(&self, other: &PySfEtt) -> PyResult<Self> {
        Ok(Self { inner: self.inner.add(&other.inner).map_err(to_py)? })
    }

    fn __mul__(&self, alpha: f64) -> Self {
        Self { inner: self.inner.scale(alpha) }
    }

    fn __rmul__(&self, alpha: f64) -> Self {
        self.__mul__(alpha)
    }

    fn round(&self, ranks: RankTuple) -> PyResult<Self> {
        Ok(Self { inner: self.inner.round(&rank(ranks)).map_err(to_py)? })
    }

    /// Flat first-index-fastest entries.
    fn to_dense(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.to_dense().map_err(to_py)?.into_data())
    }

    fn __repr__(&self) -> String {
        let (tt, tucker, shared) = self.ranks();
        format!(
            "SfEtt(dims={:?}, d_t={}, tt={tt:?}, tucker={tucker:?}, shared={shared})",
            self.inner.dims(),
            self.inner.d_t()
        )
    }
}

/// Steepest descent on `½‖A - X‖²` from `x0`. Returns the final tensor and
/// the objective per accepted iteration.
#[pyfunction]
#[pyo3(signature = (data, dims, x0, max_iters=100))]
fn rstgd(data: Vec<f64>, dims: Vec<usize>, x0: &PySfEtt, max_iters: usize) -> PyResult<(PySfEtt, Vec<f64>)> {
    let a = dense(data, dims)?;
    let opts = RstgdOptions { max_iters, ..Default::default() };
    let (x, trace) = rstgd_impl(Target::Dense(&a), &x0.inner, &x0.inner.ranks(), &opts).map_err(to_py)?;
    Ok((PySfEtt { inner: x }, trace.records.iter().map(|r| r.value).collect()))
}

/// Smallest eigenvalue of the Laplace or Henon-Heiles operator by LOCG.
#[pyfunction]
#[pyo3(signature = (op, d, n, d_t=1, rank=1, max_iters=100, tol=1e-8, seed=7, lower=-5.0, upper=5.0, coupling=HENON_LAMBDA))]
#[allow(clippy::too_many_arguments)]
fn eigs<'py>(
    py: Python<'py>,
    op: &str,
    d: usize,
    n: usize,
    d_t: usize,
    rank: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
    lower: f64,
    upper: f64,
    coupling: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let op = match op {
        "laplace" => OpKind::Laplace,
        "henon" => OpKind::Henon,
        other => return Err(PyValueError::new_err(format!("unknown operator {other:?}"))),
    };
    let cfg = EigsConfig { op, d, n, d_t, rank, lower, upper, lambda: coupling, max_iters, tol, seed };
    let rep = py.detach(|| cmd_eigs(&cfg)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("theta", rep.theta)?;
    out.set_item("reference", rep.reference)?;
    out.set_item("rel_err", rep.rel_err)?;
    out.set_item("iterations", rep.trace.iterations())?;
    out.set_item("converged", rep.trace.converged)?;
    out.set_item("history", rep.trace.records.iter().map(|r| r.value).collect::<Vec<_>>())?;
    out.set_item("x", PySfEtt { inner: rep.x })?;
    out.set_item("csv", rep.csv)?;
    Ok(out)
}

/// Rank sweep CSV for `hilbert`, `gauss` or `random` targets.
#[pyfunction]
#[pyo3(signature = (func, d, n, d_t=1, points=6, rsgd=true, max_iters=20, seed=0))]
#[allow(clippy::too_many_arguments)]
fn approx(
    py: Python<'_>,
    func: &str,
    d: usize,
    n: usize,
    d_t: usize,
    points: usize,
    rsgd: bool,
    max_iters: usize,
    seed: u64,
) -> PyResult<String> {
    let func = match func {
        "hilbert" => FuncKind::Hilbert,
        "gauss" => FuncKind::Gauss,
        "random" => FuncKind::Random,
        other => return Err(PyValueError::new_err(format!("unknown function {other:?}"))),
    };
    let cfg = ApproxConfig { func, d, n, d_t, points, rsgd, max_iters, seed, ..Default::default() };
    Ok(py.detach(|| cmd_approx(&cfg)).map_err(to_py)?.csv)
}

#[pyfunction]
fn laplace_min_eig(d: usize, n: usize) -> f64 {
    laplace_min_eig_impl(d, n)
}

/// Dimension of the fixed-rank manifold.
#[pyfunction]
fn manifold_dim(dims: Vec<usize>, d_t: usize, ranks: RankTuple) -> PyResult<usize> {
    manifold_dim_impl(&dims, d_t, &rank(ranks)).map_err(to_py)
}

pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("HENON_LAMBDA", HENON_LAMBDA)?;
    m.add_class::<PySfEtt>()?;
    m.add_function(wrap_pyfunction!(rstgd, m)?)?;
    m.add_function(wrap_pyfunction!(eigs, m)?)?;
    m.add_function(wrap_pyfunction!(approx, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_min_eig, m)?)?;
    m.add_function(wrap_pyfunction!(manifold_dim, m)?)?;
    Ok(())
}

#[pymodule]
fn sfett(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
