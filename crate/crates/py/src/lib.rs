//! Python bindings. Rationals cross the boundary as `fractions.Fraction`,
//! structured results as the same JSON documents the CLI prints, decoded into
//! Python objects.

use borcherds_core::battery::{run_all, run_battery};
use borcherds_core::borcherds::{
    self as bp, AdmissibleSetSpec, DecomposeOptions, ModularBasisFixture, PrescribeOptions, Provider,
};
use borcherds_core::eisenstein::EisensteinContext;
use borcherds_core::localdata::{count, CountConfig};
use borcherds_core::num::{fmt_rational, parse_rational};
use borcherds_core::weilrep::{weil_doc, weil_matrices};
use borcherds_core::{json, Error, ErrorKind, EvenLattice, Rational};
use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(borcherds, BorcherdsError, PyException);
create_exception!(borcherds, PreconditionError, BorcherdsError);
create_exception!(borcherds, BudgetError, BorcherdsError);

fn err(e: Error) -> PyErr {
    match e.kind() {
        ErrorKind::Precondition => PreconditionError::new_err(e.to_string()),
        ErrorKind::Budget => BudgetError::new_err(e.to_string()),
        _ => BorcherdsError::new_err(e.to_string()),
    }
}

fn rational(x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse_rational(&x.str()?.to_cow()?).map_err(err)
}

fn fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_rational(x),))
}

fn loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn dumps(x: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = x.extract::<String>() {
        return Ok(s);
    }
    x.py().import("json")?.call_method1("dumps", (x,))?.extract()
}

/// An even lattice given by its Gram matrix.
#[pyclass(name = "Lattice", module = "borcherds", frozen)]
struct PyLattice {
    inner: EvenLattice,
}

#[pymethods]
impl PyLattice {
    #[new]
    fn new(gram: Vec<Vec<i64>>) -> PyResult<Self> {
        Ok(PyLattice { inner: EvenLattice::new(gram).map_err(err)? })
    }

    /// The (12, 2) fixture E8 + D4 + <-2> + <-2>.
    #[staticmethod]
    fn fixture_12_2() -> Self {
        PyLattice { inner: borcherds_core::lattice::standard::fixture_12_2() }
    }

    #[staticmethod]
    fn e8() -> Self {
        PyLattice { inner: borcherds_core::lattice::standard::e8() }
    }

    #[getter]
    fn gram(&self) -> Vec<Vec<i64>> {
        self.inner.gram().to_vec()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn signature(&self) -> (usize, usize) {
        self.inner.signature()
    }

    #[getter]
    fn det(&self) -> BigInt {
        self.inner.det().clone()
    }

    #[getter]
    fn level(&self) -> u64 {
        self.inner.level()
    }

    #[getter]
    fn invariants(&self) -> Vec<u64> {
        self.inner.disc().invariants().to_vec()
    }

    fn disc_order(&self) -> usize {
        self.inner.disc().order()
    }

    /// Residue vector of discriminant element `mu`.
    fn element(&self, mu: usize) -> PyResult<Vec<u64>> {
        self.check(mu)?;
        Ok(self.inner.disc().element(mu).residues.clone())
    }

    /// `Q(mu)` mod 1.
    fn q<'py>(&self, py: Python<'py>, mu: usize) -> PyResult<Bound<'py, PyAny>> {
        self.check(mu)?;
        fraction(py, self.inner.disc().q(mu))
    }

    fn negated(&self) -> Self {
        PyLattice { inner: self.inner.negated() }
    }

    fn to_json(&self) -> String {
        json::lattice_to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        let (p, n) = self.inner.signature();
        format!("Lattice(rank={}, signature=({p}, {n}), det={})", self.inner.rank(), self.inner.det())
    }
}

impl PyLattice {
    fn check(&self, mu: usize) -> PyResult<()> {
        if mu >= self.inner.disc().order() {
            return Err(PreconditionError::new_err(format!("element index {mu} out of range")));
        }
        Ok(())
    }
}

/// Number of `x` in `(mu + L) / aL` with `Q(x) = m` mod `a`.
#[pyfunction]
fn rep_count(lattice: &PyLattice, m: &Bound<'_, PyAny>, mu: usize, modulus: u64) -> PyResult<BigInt> {
    let r = count(&lattice.inner, &rational(m)?, mu, modulus, &CountConfig::default()).map_err(err)?;
    Ok(r.count)
}

/// `e_{kappa,L}(m, mu)` for `kappa = rank / 2`.
#[pyfunction]
#[pyo3(signature = (lattice, m, mu=0))]
fn eis_coefficient<'py>(py: Python<'py>, lattice: &PyLattice, m: &Bound<'py, PyAny>, mu: usize) -> PyResult<Bound<'py, PyAny>> {
    let m = rational(m)?;
    let v = py.detach(|| EisensteinContext::new(&lattice.inner).and_then(|c| c.coefficient(&m, mu))).map_err(err)?;
    fraction(py, &v)
}

/// The Eisenstein series below `trunc` as a series document.
#[pyfunction]
fn eis_expansion<'py>(py: Python<'py>, lattice: &PyLattice, trunc: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let t = rational(trunc)?;
    let ex = py.detach(|| EisensteinContext::new(&lattice.inner).and_then(|c| c.expansion(&t))).map_err(err)?;
    let mut doc = json::series_doc(&ex.series);
    doc.hecke_trick_flag = ex.hecke_trick_flag;
    loads(py, &json::to_pretty(&doc))
}

/// Weil representation matrices with `relations_ok` and rational `invariants`.
#[pyfunction]
fn weil<'py>(py: Python<'py>, lattice: &PyLattice) -> PyResult<Bound<'py, PyAny>> {
    let w = weil_matrices(lattice.inner.disc(), lattice.inner.signature());
    let doc = weil_doc(&w);
    let out = loads(py, &json::to_pretty(&doc))?;
    out.set_item("relations_ok", w.verify_relations())?;
    let inv: Vec<Vec<String>> = w.invariants().iter().map(|v| v.iter().map(fmt_rational).collect()).collect();
    out.set_item("invariants", inv)?;
    Ok(out)
}

/// `h = Delta^-b E` on a lattice of signature `(n, 2)`.
#[pyfunction]
#[pyo3(signature = (lattice, b=1, trunc=5))]
fn build_h<'py>(py: Python<'py>, lattice: &PyLattice, b: i64, trunc: i64) -> PyResult<Bound<'py, PyAny>> {
    let t = Rational::from_integer(BigInt::from(trunc));
    let h = py.detach(|| bp::build_h(&lattice.inner, b, &Provider::Eisenstein, &t, bp::DEFAULT_RADIUS)).map_err(err)?;
    loads(py, &json::series_to_json(&h.series))
}

fn parse_pp(lattice: &PyLattice, pp: &Bound<'_, PyAny>) -> PyResult<borcherds_core::qseries::PrincipalPart> {
    json::parse_principal_part(&dumps(pp)?, lattice.inner.disc_arc()).map_err(err)
}

/// `c(0, 0) = -sum c(-l, nu) e(l, nu)` for a principal part document.
#[pyfunction]
fn constant_term<'py>(py: Python<'py>, lattice: &PyLattice, pp: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let f = parse_pp(lattice, pp)?;
    let c = py.detach(|| bp::constant_term(&lattice.inner, &f, false, bp::DEFAULT_RADIUS)).map_err(err)?;
    fraction(py, &c)
}

/// Returns `{"b", "c", "f1", "f2"}` with `f = f1 - f2`.
#[pyfunction]
#[pyo3(signature = (lattice, pp, strict_paper=false, minimal=false))]
fn decompose<'py>(py: Python<'py>, lattice: &PyLattice, pp: &Bound<'py, PyAny>, strict_paper: bool, minimal: bool) -> PyResult<Bound<'py, PyAny>> {
    let f = parse_pp(lattice, pp)?;
    let opts = DecomposeOptions { strict_paper, minimal, ..Default::default() };
    let d = py.detach(|| bp::decompose(&lattice.inner, &f, &opts)).map_err(err)?;
    let disc = lattice.inner.disc();
    let out = pyo3::types::PyDict::new(py);
    out.set_item("b", d.b)?;
    out.set_item("c", d.c)?;
    out.set_item("f1", loads(py, &json::principal_part_to_json(&d.f1, disc))?)?;
    out.set_item("f2", loads(py, &json::principal_part_to_json(&d.f2, disc))?)?;
    Ok(out.into_any())
}

fn members(members: Vec<(Bound<'_, PyAny>, usize)>) -> PyResult<Vec<(Rational, usize)>> {
    members.into_iter().map(|(m, mu)| Ok((rational(&m)?, mu))).collect()
}

/// Principal part supported on `members` with an empty cusp fixture.
#[pyfunction]
#[pyo3(signature = (lattice, members_, bound=4, budget=64))]
fn prescribe<'py>(
    py: Python<'py>,
    lattice: &PyLattice,
    members_: Vec<(Bound<'py, PyAny>, usize)>,
    bound: i64,
    budget: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = AdmissibleSetSpec::explicit(bound, members(members_)?);
    let (n, m) = lattice.inner.signature();
    let fixture = ModularBasisFixture::empty(Rational::new(BigInt::from(n + m), BigInt::from(2)));
    let opts = PrescribeOptions { budget, ..Default::default() };
    let r = py.detach(|| bp::prescribe(&lattice.inner, &spec, &fixture, &opts)).map_err(err)?;
    let out = loads(py, &json::principal_part_to_json(&r.pp, lattice.inner.disc()))?;
    out.set_item("candidates_tried", r.candidates_tried)?;
    Ok(out)
}

/// Non-negative integral principal part with a positive entry at `(m, mu)`.
#[pyfunction]
#[pyo3(signature = (lattice, m, mu=0, budget=64))]
fn vanish_on<'py>(py: Python<'py>, lattice: &PyLattice, m: &Bound<'py, PyAny>, mu: usize, budget: usize) -> PyResult<Bound<'py, PyAny>> {
    let m = rational(m)?;
    let (n, k) = lattice.inner.signature();
    let fixture = ModularBasisFixture::empty(Rational::new(BigInt::from(n + k), BigInt::from(2)));
    let popts = PrescribeOptions { budget, ..Default::default() };
    let r = py
        .detach(|| bp::vanish_on(&lattice.inner, &m, mu, &fixture, &popts, &DecomposeOptions::default()))
        .map_err(err)?;
    loads(py, &json::principal_part_to_json(r.pp(), lattice.inner.disc()))
}

/// Runs the acceptance battery, all criteria by default.
#[pyfunction]
#[pyo3(signature = (criteria=None))]
fn battery<'py>(py: Python<'py>, criteria: Option<Vec<u32>>) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| match criteria {
        Some(c) => run_battery(&c),
        None => run_all(),
    });
    loads(py, &json::to_pretty(&report))
}

#[pymodule]
fn borcherds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BorcherdsError", m.py().get_type::<BorcherdsError>())?;
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    m.add_class::<PyLattice>()?;
    m.add_function(wrap_pyfunction!(rep_count, m)?)?;
    m.add_function(wrap_pyfunction!(eis_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(eis_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(weil, m)?)?;
    m.add_function(wrap_pyfunction!(build_h, m)?)?;
    m.add_function(wrap_pyfunction!(constant_term, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(prescribe, m)?)?;
    m.add_function(wrap_pyfunction!(vanish_on, m)?)?;
    m.add_function(wrap_pyfunction!(battery, m)?)?;
    Ok(())
}
