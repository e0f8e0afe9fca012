//! Python bindings for `rootgas`.

use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rootgas::bethe::{self, BetheSolution, SolveOptions};
use rootgas::eigen::{self, EigenfunctionEval};
use rootgas::suite::{run_suite, SuiteOptions};
use rootgas::{CartanKind, Multiplicity};

fn err(e: rootgas::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn multiplicity(long: f64, short: Option<f64>) -> Multiplicity {
    Multiplicity::new(long, short.unwrap_or(long))
}

#[pyclass(name = "RootSystem", module = "rootgas_py", frozen)]
pub struct PyRootSystem {
    rs: Arc<rootgas::RootSystem>,
    wg: Option<Arc<rootgas::WeylGroup>>,
}

impl PyRootSystem {
    fn weyl(&self) -> PyResult<&rootgas::WeylGroup> {
        self.wg
            .as_deref()
            .ok_or_else(|| PyValueError::new_err("Weyl group enumeration exceeds the order cap"))
    }
}

#[pymethods]
impl PyRootSystem {
    #[new]
    fn new(kind: &str, rank: usize) -> PyResult<Self> {
        let kind: CartanKind = kind.parse().map_err(err)?;
        let rs = rootgas::RootSystem::new(kind, rank).map_err(err)?;
        let wg = rootgas::WeylGroup::new(&rs).ok().map(Arc::new);
        Ok(Self { rs: Arc::new(rs), wg })
    }

    #[getter]
    fn name(&self) -> String {
        self.rs.name()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.rs.rank
    }

    #[getter]
    fn weyl_order(&self) -> u128 {
        rootgas::root_system::weyl_order(self.rs.kind, self.rs.rank)
    }

    #[getter]
    fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        self.rs.cartan.clone()
    }

    /// Simple-root coefficients of the positive roots, by height.
    #[getter]
    fn positive_roots(&self) -> Vec<Vec<i64>> {
        self.rs.positive_roots().map(|a| self.rs.coefficients[a].clone()).collect()
    }

    #[getter]
    fn roots(&self) -> Vec<Vec<f64>> {
        self.rs.roots.clone()
    }

    #[getter]
    fn coroots(&self) -> Vec<Vec<f64>> {
        self.rs.coroots.clone()
    }

    #[getter]
    fn fundamental_weights(&self) -> Vec<Vec<f64>> {
        self.rs.fundamental_weights.clone()
    }

    #[getter]
    fn rho(&self) -> Vec<f64> {
        self.rs.rho.clone()
    }

    fn weight(&self, coeffs: Vec<i64>) -> PyResult<Vec<f64>> {
        self.rs.weight(&coeffs).map_err(err)
    }

    /// Returns `(word, image)` with `image` in the closed fundamental alcove.
    fn fold(&self, v: Vec<f64>) -> PyResult<(Vec<usize>, Vec<f64>)> {
        if v.len() != self.rs.rank {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        self.rs.fold_to_alcove(&v).map_err(err)
    }

    #[pyo3(signature = (k_long, lam, k_short=None))]
    fn c_tilde(&self, k_long: f64, lam: Vec<Complex64>, k_short: Option<f64>) -> (Complex64, bool) {
        let c = eigen::c_tilde(&self.rs, &multiplicity(k_long, k_short), &lam);
        (c.value, c.pole_flag)
    }

    /// Solves the Bethe ansatz equations for the given weight.
    #[pyo3(signature = (weight, k_long, k_short=None, tol=1e-12, max_iter=100))]
    fn solve(&self, weight: Vec<i64>, k_long: f64, k_short: Option<f64>, tol: f64, max_iter: usize) -> PyResult<PySolution> {
        let k = multiplicity(k_long, k_short);
        let opts = SolveOptions { tol, max_iter };
        let sol = bethe::solve(&self.rs, self.weyl()?, &k, &weight, &opts).map_err(err)?;
        Ok(PySolution { sol, k })
    }

    /// Bethe eigenfunction of a solved, regular instance.
    fn eigenfunction(&self, solution: &PySolution) -> PyResult<PyEigenfunction> {
        if solution.sol.system != self.rs.name() {
            return Err(PyValueError::new_err("solution belongs to another root system"));
        }
        let eig = EigenfunctionEval::from_solution(&self.rs, self.weyl()?, &solution.k, &solution.sol).map_err(err)?;
        Ok(PyEigenfunction { rs: self.rs.clone(), eig })
    }

    fn impenetrable(&self, weight: Vec<i64>) -> PyResult<PyEigenfunction> {
        let eig = EigenfunctionEval::impenetrable(&self.rs, self.weyl()?, &weight).map_err(err)?;
        Ok(PyEigenfunction { rs: self.rs.clone(), eig })
    }

    fn free(&self, weight: Vec<i64>) -> PyResult<PyEigenfunction> {
        let eig = EigenfunctionEval::free(&self.rs, self.weyl()?, &weight).map_err(err)?;
        Ok(PyEigenfunction { rs: self.rs.clone(), eig })
    }

    /// Runs the verification suite and returns its JSON report.
    #[pyo3(signature = (weight, k_long, k_short=None, seed=42))]
    fn verify(&self, py: Python<'_>, weight: Vec<i64>, k_long: f64, k_short: Option<f64>, seed: u64) -> PyResult<String> {
        let k = multiplicity(k_long, k_short);
        let opts = SuiteOptions {
            seed,
            ..SuiteOptions::default()
        };
        let wg = self.weyl()?;
        let rs = self.rs.clone();
        let rep = py.detach(|| run_suite(&rs, wg, &k, &weight, &opts)).map_err(err)?;
        serde_json::to_string(&rep).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("RootSystem('{}', {})", self.rs.kind, self.rs.rank)
    }
}

#[pyclass(name = "BetheSolution", module = "rootgas_py", frozen)]
pub struct PySolution {
    sol: BetheSolution,
    k: Multiplicity,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.sol.mu.clone()
    }

    #[getter]
    fn mu_hat(&self) -> Vec<f64> {
        self.sol.mu_hat.clone()
    }

    /// `μ̂(a_i^∨)` for the simple coroots.
    #[getter]
    fn pairings(&self) -> Vec<f64> {
        self.sol.mu_hat_pairings.clone()
    }

    #[getter]
    fn lam(&self) -> Vec<Complex64> {
        self.sol.lambda.clone()
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.sol.energy
    }

    #[getter]
    fn grad_norm(&self) -> f64 {
        self.sol.grad_norm
    }

    #[getter]
    fn bae_residual(&self) -> f64 {
        self.sol.bae_residual
    }

    #[getter]
    fn regular(&self) -> bool {
        self.sol.regular
    }

    #[getter]
    fn excluded(&self) -> bool {
        self.sol.pauli.excluded
    }

    #[getter]
    fn min_eig_k(&self) -> f64 {
        self.sol.pauli.min_eigenvalue
    }

    #[getter]
    fn gap_bounds_hold(&self) -> bool {
        self.sol.gap.holds
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.sol).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("BetheSolution({}, weight={:?}, energy={})", self.sol.system, self.sol.weight, self.sol.energy)
    }
}

#[pyclass(name = "Eigenfunction", module = "rootgas_py", frozen)]
pub struct PyEigenfunction {
    rs: Arc<rootgas::RootSystem>,
    eig: EigenfunctionEval,
}

#[pymethods]
impl PyEigenfunction {
    #[getter]
    fn energy(&self) -> f64 {
        self.eig.energy()
    }

    #[getter]
    fn mode(&self) -> String {
        format!("{:?}", self.eig.mode)
    }

    #[getter]
    fn num_terms(&self) -> usize {
        self.eig.psi.num_terms()
    }

    fn __call__(&self, v: Vec<f64>) -> PyResult<Complex64> {
        if v.len() != self.rs.rank {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        self.eig.eval(&self.rs, &v).map_err(err)
    }

    fn eval_many(&self, py: Python<'_>, points: Vec<Vec<f64>>) -> PyResult<Vec<Complex64>> {
        if points.iter().any(|p| p.len() != self.rs.rank) {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        py.detach(|| points.iter().map(|p| self.eig.eval(&self.rs, p)).collect::<rootgas::Result<Vec<_>>>())
            .map_err(err)
    }
}

#[pymodule]
fn rootgas_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRootSystem>()?;
    m.add_class::<PySolution>()?;
    m.add_class::<PyEigenfunction>()?;
    Ok(())
}
