//! Python bindings. Points and vectors cross as lists of residues, reports as
//! JSON strings.

use coble::chords::{GroupContext, PointPool};
use coble::exterior::Trivector as CoreTrivector;
use coble::field::PrimeField;
use coble::orbits8::{classify8, FingerprintDb};
use coble::pfaffloci::{coble_cubic, kernel5, rank_at, HomogeneousForm, ProjPoint};
use coble::scanner::enumerate_a;
use coble::session::{generate, stream, suitability_gate, RunConfig, Suite, TrivectorFile, CRITERIA, VERSION};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(q: u32) -> PyResult<PrimeField> {
    PrimeField::new(q).map_err(py_err)
}

fn point(f: &PrimeField, v: &[u32]) -> PyResult<ProjPoint> {
    ProjPoint::new(f, v).ok_or_else(|| PyValueError::new_err("zero vector"))
}

/// An alternating trivector over F_q in 8 or 9 variables.
#[pyclass(module = "pycoble", from_py_object)]
#[derive(Clone)]
pub struct Trivector {
    f: PrimeField,
    w: CoreTrivector,
}

#[pymethods]
impl Trivector {
    /// Uniformly random coefficients, no gate.
    #[staticmethod]
    #[pyo3(signature = (prime, seed, dim = 9))]
    fn random(prime: u32, seed: u64, dim: usize) -> PyResult<Self> {
        let f = field(prime)?;
        let w = CoreTrivector::random(&f, dim, &mut stream(seed, 0));
        Ok(Trivector { f, w })
    }

    /// The seeded trivector that passes the suitability gate.
    #[staticmethod]
    fn generate(prime: u32, seed: u64) -> PyResult<Self> {
        let g = generate(prime, seed).map_err(py_err)?;
        Ok(Trivector { f: g.field, w: g.omega })
    }

    /// Sum of coefficient·e_i∧e_j∧e_k over 0-based triples.
    #[staticmethod]
    fn from_entries(prime: u32, dim: usize, entries: Vec<([usize; 3], u32)>) -> PyResult<Self> {
        let f = field(prime)?;
        let w = CoreTrivector::from_entries(&f, dim, &entries).map_err(py_err)?;
        Ok(Trivector { f, w })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: TrivectorFile = serde_json::from_str(text).map_err(py_err)?;
        let (f, w) = file.to_trivector().map_err(py_err)?;
        Ok(Trivector { f, w })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&TrivectorFile::new(&self.f, &self.w, None)).map_err(py_err)
    }

    #[getter]
    fn prime(&self) -> u32 {
        self.f.modulus()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.w.dim()
    }

    fn entries(&self) -> Vec<([usize; 3], u32)> {
        self.w.nonzero_entries().collect()
    }

    fn double_contract(&self, p: Vec<u32>, q: Vec<u32>) -> PyResult<Vec<u32>> {
        self.w.double_contract(&self.f, &p, &q).map_err(py_err)
    }

    fn rank_at(&self, p: Vec<u32>) -> PyResult<usize> {
        if p.len() != self.w.dim() {
            return Err(PyValueError::new_err("covector length"));
        }
        Ok(rank_at(&self.f, &self.w, &p))
    }

    /// Basis of ker M(p) for a point of the surface.
    fn kernel5(&self, p: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
        Ok(kernel5(&self.f, &self.w, &p).map_err(py_err)?.basis().to_vec())
    }

    /// The gate report as JSON.
    #[pyo3(signature = (seed = 0))]
    fn gate(&self, seed: u64) -> PyResult<String> {
        serde_json::to_string(&suitability_gate(&self.f, &self.w, seed).report).map_err(py_err)
    }

    fn coble_cubic(&self) -> PyResult<Form> {
        Ok(Form(coble_cubic(&self.f, &self.w).map_err(py_err)?.form))
    }

    /// Every point of the surface over F_q (q ≤ 13).
    fn enumerate_a(&self) -> PyResult<Vec<Vec<u32>>> {
        let r = enumerate_a(&self.f, &self.w).map_err(py_err)?;
        Ok(r.points.into_iter().map(ProjPoint::into_coords).collect())
    }

    /// Orbit label of a trivector in eight variables (q ≤ 11).
    fn classify(&self) -> PyResult<String> {
        let db = FingerprintDb::build(&self.f).map_err(py_err)?;
        Ok(classify8(&db, &self.f, &self.w).map_err(py_err)?.to_string())
    }

    fn __repr__(&self) -> String {
        format!("Trivector(prime={}, dim={}, terms={})", self.f.modulus(), self.w.dim(), self.w.nonzero_entries().count())
    }
}

/// A homogeneous form with dense coefficients in lexicographic exponent order.
#[pyclass(module = "pycoble", skip_from_py_object)]
#[derive(Clone)]
pub struct Form(HomogeneousForm);

#[pymethods]
impl Form {
    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.0.nvars()
    }

    fn coeffs(&self) -> Vec<u32> {
        self.0.coeffs().to_vec()
    }

    fn eval(&self, x: Vec<u32>) -> PyResult<u32> {
        if x.len() != self.0.nvars() {
            return Err(PyValueError::new_err("point length"));
        }
        Ok(self.0.eval(&x))
    }

    fn gradient_at(&self, x: Vec<u32>) -> PyResult<Vec<u32>> {
        if x.len() != self.0.nvars() {
            return Err(PyValueError::new_err("point length"));
        }
        Ok(self.0.gradient().iter().map(|g| g.eval(&x)).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(py_err)
    }
}

/// The group law on the surface points of a suitable trivector.
#[pyclass(module = "pycoble")]
pub struct Group(GroupContext);

#[pymethods]
impl Group {
    #[new]
    #[pyo3(signature = (omega, seed = 0))]
    fn new(omega: &Trivector, seed: u64) -> PyResult<Self> {
        let s = suitability_gate(&omega.f, &omega.w, seed);
        if !s.report.passed {
            let why = s.report.diagnostic.unwrap_or_default();
            return Err(PyValueError::new_err(format!("unsuitable trivector: {why}")));
        }
        let pool: PointPool = s.pool.expect("a passed gate keeps its points");
        GroupContext::new(&omega.f, &omega.w, pool, seed).map(Group).map_err(py_err)
    }

    #[getter]
    fn identity(&self) -> Vec<u32> {
        self.0.identity.coords().to_vec()
    }

    #[getter]
    fn chord_constant(&self) -> Vec<u32> {
        self.0.chord_constant.coords().to_vec()
    }

    /// Number of points when the pool is all of A(F_q).
    #[getter]
    fn order(&self) -> Option<usize> {
        self.0.pool().complete.then(|| self.0.pool().len())
    }

    fn points(&self) -> Vec<Vec<u32>> {
        self.0.pool().points().iter().map(|p| p.coords().to_vec()).collect()
    }

    /// The third point of A on the chord through x and y.
    fn third(&mut self, x: Vec<u32>, y: Vec<u32>) -> PyResult<Vec<u32>> {
        let f = self.0.field();
        let r = self.0.third(&point(&f, &x)?, &point(&f, &y)?).map_err(py_err)?;
        Ok(r.into_coords())
    }

    fn add(&mut self, x: Vec<u32>, y: Vec<u32>) -> PyResult<Vec<u32>> {
        let f = self.0.field();
        let r = self.0.add(&point(&f, &x)?, &point(&f, &y)?).map_err(py_err)?;
        Ok(r.into_coords())
    }

    fn neg(&mut self, x: Vec<u32>) -> PyResult<Vec<u32>> {
        let f = self.0.field();
        Ok(self.0.neg(&point(&f, &x)?).map_err(py_err)?.into_coords())
    }

    fn scalar_mul(&mut self, n: i64, x: Vec<u32>) -> PyResult<Vec<u32>> {
        let f = self.0.field();
        Ok(self.0.scalar_mul(n, &point(&f, &x)?).map_err(py_err)?.into_coords())
    }
}

/// Runs the verification criteria (all by default) and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (checks = None, seed = 0, omega = None))]
fn verify(py: Python<'_>, checks: Option<Vec<u32>>, seed: u64, omega: Option<Trivector>) -> PyResult<String> {
    let ids = checks.unwrap_or_else(|| CRITERIA.iter().map(|c| c.id).collect());
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.id == **id)) {
        return Err(PyValueError::new_err(format!("no criterion {bad}")));
    }
    py.detach(|| {
        let mut suite = Suite::new(RunConfig::new("verify", 7, seed));
        if let Some(t) = omega {
            suite = suite.with_input(t.f, t.w);
        }
        suite.screen_input();
        for id in ids {
            suite.run_one(id);
        }
        serde_json::to_string(&suite.report()).map_err(py_err)
    })
}

#[pymodule]
fn pycoble(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", VERSION)?;
    m.add_class::<Trivector>()?;
    m.add_class::<Form>()?;
    m.add_class::<Group>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
