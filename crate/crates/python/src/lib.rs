//! Python bindings for the core computations.
//!
//! Structured reports (nerve pipelines, scans, counts) are returned as plain
//! dicts decoded from their JSON form.

use diamtors_core::gabber::{self, GabberScan, GabberTable};
use diamtors_core::geometry::{self, GeometryParams, SharpnessParams};
use diamtors_core::gl::{self, CountOptions, FractionParams};
use diamtors_core::pipeline::{self, NerveConfig};
use diamtors_core::{homology, schreier, subgroups, BlockTable, Error};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(diamtors, ScaleExceededError, PyException, "An exhaustive routine was asked for too large a size.");
create_exception!(diamtors, InvariantError, PyException, "An internal consistency check failed.");
create_exception!(diamtors, ConstantTableMissingError, PyValueError, "No torsion constant covers the required degree.");

fn err(e: Error) -> PyErr {
    match e {
        Error::ScaleExceeded { .. } => ScaleExceededError::new_err(e.to_string()),
        Error::Invariant(_) | Error::RejectionCapExceeded { .. } => InvariantError::new_err(e.to_string()),
        Error::ConstantTableMissing { .. } => ConstantTableMissingError::new_err(e.to_string()),
        Error::InvalidInput(_) | Error::Json(_) => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn table_from(py: Python<'_>, table: Option<&Bound<'_, PyAny>>) -> PyResult<Option<GabberTable>> {
    let Some(t) = table else { return Ok(None) };
    let text: String = py.import("json")?.call_method1("dumps", (t,))?.extract()?;
    if let Ok(table) = GabberTable::from_json(&text) {
        return Ok(Some(table));
    }
    serde_json::from_str::<GabberScan>(&text)
        .map(|s| Some(s.table()))
        .map_err(|e| PyValueError::new_err(format!("neither a constant table nor a scan: {e}")))
}

/// A transitive pair of permutations with a base point.
#[pyclass(module = "diamtors", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct SchreierGraph(schreier::SchreierGraph);

#[pymethods]
impl SchreierGraph {
    #[new]
    #[pyo3(signature = (sigma_a, sigma_b, base = 0))]
    fn new(sigma_a: Vec<u32>, sigma_b: Vec<u32>, base: u32) -> PyResult<Self> {
        schreier::SchreierGraph::new(sigma_a, sigma_b, base).map(Self).map_err(err)
    }

    #[getter]
    fn sigma_a(&self) -> Vec<u32> {
        self.0.sigma_a().to_vec()
    }

    #[getter]
    fn sigma_b(&self) -> Vec<u32> {
        self.0.sigma_b().to_vec()
    }

    #[getter]
    fn base(&self) -> u32 {
        self.0.base()
    }

    fn __len__(&self) -> usize {
        self.0.n_vertices()
    }

    fn diameter(&self) -> u32 {
        schreier::graph_diameter(&self.0)
    }

    /// Representative of the pointed isomorphism class.
    fn canonical(&self) -> Self {
        Self(self.0.canonical())
    }

    fn adjacency(&self) -> Vec<[u32; 4]> {
        self.0.adjacency()
    }

    fn __repr__(&self) -> String {
        format!("SchreierGraph(n={}, base={})", self.0.n_vertices(), self.0.base())
    }
}

/// A finite simplicial complex, closed under faces.
#[pyclass(module = "diamtors", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct SimplicialComplex(diamtors_core::SimplicialComplex);

#[pymethods]
impl SimplicialComplex {
    #[new]
    fn new(n_vertices: usize, simplices: Vec<Vec<u32>>) -> PyResult<Self> {
        diamtors_core::SimplicialComplex::from_simplices(n_vertices, simplices)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        diamtors_core::SimplicialComplex::from_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.0.n_vertices()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn simplices(&self, p: usize) -> Vec<Vec<u32>> {
        self.0.simplices(p).to_vec()
    }

    fn counts(&self) -> Vec<usize> {
        self.0.counts()
    }

    fn euler_characteristic(&self) -> i64 {
        self.0.euler_characteristic()
    }

    fn max_degree(&self) -> usize {
        self.0.max_degree()
    }

    fn homology(&self) -> PyResult<HomologyProfile> {
        homology::homology(&self.0).map(HomologyProfile).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("SimplicialComplex(n_vertices={}, counts={:?})", self.0.n_vertices(), self.0.counts())
    }
}

/// Integral homology: Betti numbers and torsion invariant factors per degree.
#[pyclass(module = "diamtors", frozen)]
pub struct HomologyProfile(diamtors_core::HomologyProfile);

#[pymethods]
impl HomologyProfile {
    fn betti_numbers(&self) -> Vec<usize> {
        self.0.betti_numbers()
    }

    fn torsion(&self, p: usize) -> Vec<BigUint> {
        self.0.torsion(p).to_vec()
    }

    fn torsion_order(&self, p: usize) -> BigUint {
        self.0.torsion_order(p)
    }

    fn log_torsion(&self, p: usize) -> f64 {
        self.0.log_torsion(p)
    }

    fn euler_characteristic(&self) -> i64 {
        self.0.euler_characteristic()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __repr__(&self) -> String {
        let torsion: Vec<Vec<String>> = (0..self.0.degrees().len())
            .map(|p| self.0.torsion(p).iter().map(BigUint::to_string).collect())
            .collect();
        format!("HomologyProfile(betti={:?}, torsion={torsion:?})", self.0.betti_numbers())
    }
}

/// A sampled model space or an explicit distance matrix.
#[pyclass(module = "diamtors", frozen)]
pub struct FiniteMetricSpace(diamtors_core::FiniteMetricSpace);

#[pymethods]
impl FiniteMetricSpace {
    #[staticmethod]
    fn flat_torus(dims: usize, resolution: usize) -> PyResult<Self> {
        diamtors_core::FiniteMetricSpace::flat_torus(dims, resolution).map(Self).map_err(err)
    }

    #[staticmethod]
    fn circle(resolution: usize) -> PyResult<Self> {
        diamtors_core::FiniteMetricSpace::circle(resolution).map(Self).map_err(err)
    }

    #[staticmethod]
    fn round_sphere(resolution: usize) -> PyResult<Self> {
        diamtors_core::FiniteMetricSpace::round_sphere(resolution).map(Self).map_err(err)
    }

    #[staticmethod]
    fn projective_plane(resolution: usize) -> PyResult<Self> {
        diamtors_core::FiniteMetricSpace::projective_plane(resolution).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        diamtors_core::FiniteMetricSpace::from_matrix(rows).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_points(points: Vec<Vec<f64>>) -> PyResult<Self> {
        diamtors_core::FiniteMetricSpace::from_points(&points).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.n_points()
    }

    fn distance(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.0.n_points();
        if i >= n || j >= n {
            return Err(PyValueError::new_err(format!("point index out of range for {n} points")));
        }
        Ok(self.0.distance(i, j))
    }

    /// Net, witness Čech nerve and homology as a dict.
    #[pyo3(signature = (separation, radius, max_dim = 2, gabber_table = None))]
    fn nerve<'py>(
        &self,
        py: Python<'py>,
        separation: f64,
        radius: f64,
        max_dim: usize,
        gabber_table: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = NerveConfig {
            separation,
            radius,
            max_dim,
            gabber: table_from(py, gabber_table)?,
        };
        let report = py.detach(|| pipeline::nerve_pipeline(&self.0, &cfg)).map_err(err)?;
        to_py(py, &report)
    }
}

/// Subgroup counts `a_1, …, a_N` of the free group of rank 2.
#[pyfunction]
fn subgroup_counts(max_index: usize) -> PyResult<Vec<BigUint>> {
    let t = subgroups::count_subgroups(max_index).map_err(err)?;
    Ok((1..=max_index).map(|n| t.a(n).clone()).collect())
}

/// Transitive pairs in `S_n × S_n`, counted by brute force.
#[pyfunction]
fn transitive_pairs_bruteforce(n: usize) -> PyResult<BigUint> {
    subgroups::count_transitive_pairs_bruteforce(n).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, seed = 0))]
fn sample_schreier(n: usize, seed: u64) -> PyResult<SchreierGraph> {
    schreier::sample_schreier(n, seed).map(SchreierGraph).map_err(err)
}

#[pyfunction]
fn enumerate_subgroups(py: Python<'_>, n: usize) -> PyResult<Vec<SchreierGraph>> {
    let graphs = py.detach(|| schreier::enumerate_subgroups(n)).map_err(err)?;
    Ok(graphs.into_iter().map(SchreierGraph).collect())
}

/// Diameters of `trials` uniformly random Schreier graphs on `n` vertices.
#[pyfunction]
#[pyo3(signature = (n, trials, seed = 0))]
fn diameter_samples(py: Python<'_>, n: usize, trials: usize, seed: u64) -> PyResult<Vec<u32>> {
    let stats = py.detach(|| schreier::diameter_statistics(n, trials, seed)).map_err(err)?;
    Ok(stats.diameters)
}

/// Lower bound on commensurability classes of glued manifolds of diameter at most `d_max`.
#[pyfunction]
#[pyo3(signature = (d_max, ceiling = 7, block_diameters = None, trials = 200, seed = 0))]
fn count_noncommensurable<'py>(
    py: Python<'py>,
    d_max: f64,
    ceiling: usize,
    block_diameters: Option<[f64; 6]>,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let blocks = match block_diameters {
        Some(d) => BlockTable::new(d).map_err(err)?,
        None => BlockTable::default(),
    };
    let count = py
        .detach(|| gl::count_noncommensurable(d_max, &blocks, ceiling, CountOptions { trials, seed }))
        .map_err(err)?;
    to_py(py, &count)
}

/// `(log_bound, fraction)` for the share of arithmetic manifolds up to diameter `d`.
#[pyfunction]
#[pyo3(signature = (d, c_n = 1.0, beta = 1.0, eps = 0.1, c_prime = 0.5))]
fn arithmetic_fraction_bound(d: f64, c_n: f64, beta: f64, eps: f64, c_prime: f64) -> PyResult<(f64, f64)> {
    let b = gl::arithmetic_fraction_bound(d, &FractionParams { c_n, beta, eps, c_prime }).map_err(err)?;
    Ok((b.log_bound, b.fraction))
}

#[pyfunction]
fn ball_volume(n: usize, r: f64) -> PyResult<f64> {
    geometry::ball_volume(n, r).map_err(err)
}

#[pyfunction]
fn log_ball_volume(n: usize, r: f64) -> PyResult<f64> {
    geometry::log_ball_volume(n, r).map_err(err)
}

#[pyfunction]
fn degree_bound(n: usize, r: f64) -> PyResult<f64> {
    geometry::degree_bound(n, r).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, diam, gabber_table, c_inj = 1.0))]
fn torsion_bound<'py>(
    py: Python<'py>,
    n: usize,
    diam: f64,
    gabber_table: &Bound<'py, PyAny>,
    c_inj: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let table = table_from(py, Some(gabber_table))?.expect("a table was given");
    let mut params = GeometryParams::new(n, diam);
    params.c_inj = c_inj;
    params.validate().map_err(err)?;
    to_py(py, &geometry::torsion_bound(n, diam, &params, &table).map_err(err)?)
}

#[pyfunction]
fn sharpness_chain<'py>(py: Python<'py>, a: f64, b: f64, target: f64) -> PyResult<Bound<'py, PyAny>> {
    let params = SharpnessParams {
        a,
        b,
        ..SharpnessParams::default()
    };
    to_py(py, &geometry::sharpness_chain(target, &params).map_err(err)?)
}

#[pyfunction]
fn hadamard_constant(degree: u64, p: usize) -> f64 {
    gabber::hadamard_constant(degree, p)
}

/// Empirical torsion-per-vertex constants over random complexes.
#[pyfunction]
#[pyo3(signature = (degree = 12, vmax = 40, trials = 1000, seed = 0))]
fn gabber_scan<'py>(py: Python<'py>, degree: u64, vmax: usize, trials: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let scan = py.detach(|| gabber::gabber_scan(degree, vmax, trials, seed)).map_err(err)?;
    to_py(py, &scan)
}

#[pymodule]
fn diamtors(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", diamtors_core::VERSION)?;
    m.add("ScaleExceededError", py.get_type::<ScaleExceededError>())?;
    m.add("InvariantError", py.get_type::<InvariantError>())?;
    m.add("ConstantTableMissingError", py.get_type::<ConstantTableMissingError>())?;
    m.add_class::<SchreierGraph>()?;
    m.add_class::<SimplicialComplex>()?;
    m.add_class::<HomologyProfile>()?;
    m.add_class::<FiniteMetricSpace>()?;
    m.add_function(wrap_pyfunction!(subgroup_counts, m)?)?;
    m.add_function(wrap_pyfunction!(transitive_pairs_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(sample_schreier, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_subgroups, m)?)?;
    m.add_function(wrap_pyfunction!(diameter_samples, m)?)?;
    m.add_function(wrap_pyfunction!(count_noncommensurable, m)?)?;
    m.add_function(wrap_pyfunction!(arithmetic_fraction_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(log_ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(degree_bound, m)?)?;
    m.add_function(wrap_pyfunction!(torsion_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sharpness_chain, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_constant, m)?)?;
    m.add_function(wrap_pyfunction!(gabber_scan, m)?)?;
    Ok(())
}
