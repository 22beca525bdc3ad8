//! Python bindings for the flag-manifold twistor toolkit.
//!
//! Conventions at the boundary:
//! * inputs accept Python numbers, `complex`, or `(re, im)` pairs; vectors
//!   are length-3 sequences, matrices 3×3 nested sequences;
//! * structured reports (classification, fiber analysis, branch samples,
//!   profiles, verification) come back as dicts/lists in the same shapes
//!   the CLI prints, with complex entries encoded as `[re, im]` pairs;
//! * plain numeric results use native `complex`/`float`.

use flagtwistor as ft;
use ft::linalg::{Mat3, Vec3};
use ft::proj::Param;
use ft::Flavor;
use num_complex::Complex64 as C;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict, PyList};
use serde::Serialize;

fn err(e: ft::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cplx(obj: &Bound<'_, PyAny>) -> PyResult<C> {
    if let Ok(x) = obj.extract::<f64>() {
        return Ok(C::new(x, 0.0));
    }
    if let Ok(z) = obj.extract::<C>() {
        return Ok(z);
    }
    if let Ok((re, im)) = obj.extract::<(f64, f64)>() {
        return Ok(C::new(re, im));
    }
    if let Ok(v) = obj.extract::<Vec<f64>>() {
        if v.len() == 2 {
            return Ok(C::new(v[0], v[1]));
        }
    }
    Err(PyValueError::new_err(
        "expected a number, a complex, or an (re, im) pair",
    ))
}

fn vec3_in(obj: &Bound<'_, PyAny>) -> PyResult<Vec3> {
    let items: Vec<Bound<'_, PyAny>> = obj.extract()?;
    if items.len() != 3 {
        return Err(PyValueError::new_err("expected a length-3 sequence"));
    }
    Ok([cplx(&items[0])?, cplx(&items[1])?, cplx(&items[2])?])
}

fn mat3_in(obj: &Bound<'_, PyAny>) -> PyResult<Mat3> {
    let rows: Vec<Bound<'_, PyAny>> = obj.extract()?;
    if rows.len() != 3 {
        return Err(PyValueError::new_err("expected a 3×3 matrix"));
    }
    Ok([vec3_in(&rows[0])?, vec3_in(&rows[1])?, vec3_in(&rows[2])?])
}

fn pv_in(obj: &Bound<'_, PyAny>, flavor: Flavor) -> PyResult<ft::ProjVec> {
    ft::ProjVec::new(vec3_in(obj)?, flavor).map_err(err)
}

fn flavor_in(name: &str) -> PyResult<Flavor> {
    match name {
        "point" => Ok(Flavor::Point),
        "line" => Ok(Flavor::Line),
        other => Err(PyValueError::new_err(format!(
            "unknown flavor {other:?}: expected \"point\" or \"line\""
        ))),
    }
}

fn param_in(obj: Option<&Bound<'_, PyAny>>) -> PyResult<Param> {
    match obj {
        Some(t) => Ok(Param::Finite(cplx(t)?)),
        None => Ok(Param::Infinity),
    }
}

fn c_out(py: Python<'_>, z: C) -> PyObject {
    PyComplex::from_doubles_bound(py, z.re, z.im).into_py(py)
}

fn vec3_out(py: Python<'_>, v: &Vec3) -> PyObject {
    PyList::new_bound(py, v.iter().map(|z| c_out(py, *z))).into_py(py)
}

fn mat3_out(py: Python<'_>, m: &Mat3) -> PyObject {
    PyList::new_bound(py, m.iter().map(|row| vec3_out(py, row))).into_py(py)
}

fn flag_out(py: Python<'_>, x: &ft::FlagPoint) -> PyResult<PyObject> {
    let d = PyDict::new_bound(py);
    d.set_item("p", vec3_out(py, x.p().coords()))?;
    d.set_item("l", vec3_out(py, x.l().coords()))?;
    Ok(d.into_py(py))
}

fn json_out(py: Python<'_>, v: &serde_json::Value) -> PyResult<PyObject> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py(py)
            }
        }
        Value::String(s) => s.into_py(py),
        Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for item in items {
                list.append(json_out(py, item)?)?;
            }
            list.into_py(py)
        }
        Value::Object(map) => {
            let d = PyDict::new_bound(py);
            for (k, val) in map {
                d.set_item(k, json_out(py, val)?)?;
            }
            d.into_py(py)
        }
    })
}

fn report_out<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_out(py, &v)
}

/// A surface S_A = {pAℓ = 0} in the flag manifold.
#[pyclass(module = "flagtwistor_py")]
#[derive(Clone)]
struct Surface {
    inner: ft::Surface11,
}

#[pymethods]
impl Surface {
    #[new]
    fn new(matrix: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Surface {
            inner: ft::Surface11::from_matrix(mat3_in(matrix)?).map_err(err)?,
        })
    }

    /// The matrix as given at construction.
    fn matrix(&self, py: Python<'_>) -> PyObject {
        mat3_out(py, self.inner.matrix())
    }

    /// The normalized pencil representative used internally.
    fn rep(&self, py: Python<'_>) -> PyObject {
        mat3_out(py, self.inner.rep())
    }

    /// Projective classification: {"tag", "lambda", "transform"}.
    fn classify(&self, py: Python<'_>) -> PyResult<PyObject> {
        report_out(py, &self.inner.classify())
    }

    /// The class tag alone: "A1".."A5".
    fn tag(&self) -> String {
        self.inner.classify().tag.name().to_string()
    }

    /// {"kind": "smooth"} | {"kind": "point", ...} | {"kind": "curve", ...}
    fn singular_locus(&self, py: Python<'_>) -> PyResult<PyObject> {
        report_out(py, &self.inner.singular_locus())
    }

    /// Unitary triangular form {"lambda", "a", "b", "c", "u"} (smooth A1 only).
    fn unitary_form(&self, py: Python<'_>) -> PyResult<PyObject> {
        report_out(py, &self.inner.unitary_canonical_form().map_err(err)?)
    }

    fn is_j_invariant(&self) -> bool {
        self.inner.is_j_invariant()
    }

    /// The three base points of the pencil projection (smooth case).
    fn blowup_points(&self, py: Python<'_>) -> PyResult<PyObject> {
        let pts = self.inner.blowup_points().map_err(err)?;
        let list = PyList::empty_bound(py);
        for p in &pts {
            list.append(vec3_out(py, p.coords()))?;
        }
        Ok(list.into_py(py))
    }

    /// Membership test for the flag (p, l).
    fn contains(&self, p: &Bound<'_, PyAny>, l: &Bound<'_, PyAny>) -> PyResult<bool> {
        let x = ft::FlagPoint::new(pv_in(p, Flavor::Point)?, pv_in(l, Flavor::Line)?)
            .map_err(err)?;
        Ok(self.inner.contains(&x))
    }

    /// True when the two matrices span the same pencil {αA + βI}.
    fn same_surface(&self, other: &Surface) -> bool {
        self.inner.same_surface(&other.inner)
    }

    /// True when some unitary change of coordinates carries one onto the other.
    fn unitary_equivalent(&self, other: &Surface) -> PyResult<bool> {
        ft::unitary_equivalent(&self.inner, &other.inner).map_err(err)
    }

    /// Whole twistor fibers inside the surface, same shape as the CLI
    /// `fibers` output: {"type": "empty"|"one"|"two"|"circle", ...}.
    fn fibers(&self, py: Python<'_>) -> PyResult<PyObject> {
        report_out(py, &ft::twistor_fibers_in(&self.inner).map_err(err)?)
    }

    /// Intersection with the fiber over q: {"type": "whole_fiber"} or
    /// {"type": "points", "flags": [...]}.
    fn fiber_preimages(&self, py: Python<'_>, q: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        let pre = ft::fiber_preimages(&self.inner, &pv_in(q, Flavor::Point)?).map_err(err)?;
        let d = PyDict::new_bound(py);
        match pre {
            ft::FiberPreimages::WholeFiber => d.set_item("type", "whole_fiber")?,
            ft::FiberPreimages::Points(flags) => {
                d.set_item("type", "points")?;
                let list = PyList::empty_bound(py);
                for x in &flags {
                    list.append(flag_out(py, x)?)?;
                }
                d.set_item("flags", list)?;
            }
        }
        Ok(d.into_py(py))
    }

    /// Branch-locus sample at q: {"q", "r", "factors"}.
    fn branch(&self, py: Python<'_>, q: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        report_out(py, &ft::branch_r(&self.inner, &pv_in(q, Flavor::Point)?).map_err(err)?)
    }

    /// Multistart search for zeros of the branch polynomial.
    #[pyo3(signature = (starts=32, seed=0))]
    fn branch_zeros(&self, py: Python<'_>, starts: usize, seed: u64) -> PyResult<PyObject> {
        let zeros = ft::branch_zeros(&self.inner, starts, seed).map_err(err)?;
        let list = PyList::empty_bound(py);
        for z in &zeros {
            list.append(vec3_out(py, z.coords()))?;
        }
        Ok(list.into_py(py))
    }

    /// The stacked 4×3 tangency system at q: {"rows", "rank", "minors"}.
    fn rank_drop(&self, py: Python<'_>, q: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        let sys = ft::rank_drop_system(&self.inner, &pv_in(q, Flavor::Point)?).map_err(err)?;
        let d = PyDict::new_bound(py);
        let rows = PyList::empty_bound(py);
        for row in &sys.rows {
            rows.append(vec3_out(py, row))?;
        }
        d.set_item("rows", rows)?;
        d.set_item("rank", sys.rank)?;
        d.set_item(
            "minors",
            PyList::new_bound(py, sys.minors.iter().map(|z| c_out(py, *z))),
        )?;
        Ok(d.into_py(py))
    }

    /// Determinant of the linear system cutting π₁(S ∩ j(S)) at p.
    fn conjugate_det(&self, py: Python<'_>, p: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        let z = ft::conjugate_intersection_det(&self.inner, &pv_in(p, Flavor::Point)?)
            .map_err(err)?;
        Ok(c_out(py, z))
    }

    fn __repr__(&self) -> String {
        format!("Surface(tag={})", self.inner.classify().tag.name())
    }
}

/// A (1,1)-curve L_{q,m} = {qℓ = 0, pm = 0} in the flag manifold.
#[pyclass(module = "flagtwistor_py")]
#[derive(Clone)]
struct Curve {
    inner: ft::Curve11,
}

#[pymethods]
impl Curve {
    #[new]
    fn new(q: &Bound<'_, PyAny>, m: &Bound<'_, PyAny>) -> PyResult<Self> {
        let q = pv_in(q, Flavor::Point)?;
        let m = pv_in(m, Flavor::Line)?;
        Ok(Curve {
            inner: ft::Curve11::new(q, m).map_err(err)?,
        })
    }

    fn q(&self, py: Python<'_>) -> PyObject {
        vec3_out(py, self.inner.q().coords())
    }

    fn m(&self, py: Python<'_>) -> PyObject {
        vec3_out(py, self.inner.m().coords())
    }

    /// "smooth" (qm ≠ 0) or "reducible" (a union of two fibers).
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            ft::CurveKind::Smooth => "smooth",
            ft::CurveKind::Reducible => "reducible",
        }
    }

    /// The flag at parameter t (omit t for the point at infinity).
    #[pyo3(signature = (t=None))]
    fn param(&self, py: Python<'_>, t: Option<&Bound<'_, PyAny>>) -> PyResult<PyObject> {
        let x = self.inner.param(param_in(t)?).map_err(err)?;
        flag_out(py, &x)
    }

    #[pyo3(signature = (tol=1e-9))]
    fn is_twistor_fiber(&self, tol: f64) -> bool {
        self.inner.is_twistor_fiber(tol)
    }

    /// The conjugate curve j(L_{q,m}).
    fn j_image(&self) -> Curve {
        Curve {
            inner: self.inner.j_image(),
        }
    }

    /// Set intersection with another curve: {"kind": "empty"} |
    /// {"kind": "point", "flag": {...}} | {"kind": "shared_component"}.
    fn intersect(&self, py: Python<'_>, other: &Curve) -> PyResult<PyObject> {
        let d = PyDict::new_bound(py);
        match ft::intersect(&self.inner, &other.inner).map_err(err)? {
            ft::Intersection::Empty => d.set_item("kind", "empty")?,
            ft::Intersection::OnePoint(x) => {
                d.set_item("kind", "point")?;
                d.set_item("flag", flag_out(py, &x)?)?;
            }
            ft::Intersection::SharedComponent => d.set_item("kind", "shared_component")?,
        }
        Ok(d.into_py(py))
    }

    /// The quadric containing the twistor image: {"matrix": Φ}.
    fn image_quadric(&self, py: Python<'_>) -> PyResult<PyObject> {
        let q = ft::image_quadric(&self.inner).map_err(err)?;
        let d = PyDict::new_bound(py);
        d.set_item("matrix", mat3_out(py, q.matrix()))?;
        Ok(d.into_py(py))
    }

    /// Round-sphere normal form of the image: {"rho": float, "motion": U}.
    fn sphere_form(&self, py: Python<'_>) -> PyResult<PyObject> {
        let nf = ft::sphere_normal_form(&self.inner).map_err(err)?;
        let d = PyDict::new_bound(py);
        d.set_item("rho", nf.rho)?;
        d.set_item("motion", mat3_out(py, &nf.motion))?;
        Ok(d.into_py(py))
    }

    fn __repr__(&self) -> String {
        format!("Curve(kind={})", self.kind())
    }
}

/// The twistor fiber over a base point q ∈ P².
#[pyclass(module = "flagtwistor_py")]
#[derive(Clone)]
struct Fiber {
    inner: ft::TwistorFiber,
}

#[pymethods]
impl Fiber {
    #[new]
    fn new(q: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Fiber {
            inner: ft::twistor_fiber(&pv_in(q, Flavor::Point)?).map_err(err)?,
        })
    }

    fn base(&self, py: Python<'_>) -> PyObject {
        vec3_out(py, self.inner.base().coords())
    }

    /// The flag at parameter t on the fiber (omit t for infinity).
    #[pyo3(signature = (t=None))]
    fn sample(&self, py: Python<'_>, t: Option<&Bound<'_, PyAny>>) -> PyResult<PyObject> {
        let x = self.inner.sample(param_in(t)?).map_err(err)?;
        flag_out(py, &x)
    }

    fn __repr__(&self) -> String {
        "Fiber()".to_string()
    }
}

/// Solutions z of |z|² + ez + f = 0 (0, 1, or 2 of them).
#[pyfunction]
fn solve_norm_quadratic(
    py: Python<'_>,
    e: &Bound<'_, PyAny>,
    f: &Bound<'_, PyAny>,
) -> PyResult<PyObject> {
    let sols = ft::solve_norm_quadratic(cplx(e)?, cplx(f)?).map_err(err)?;
    Ok(PyList::new_bound(py, sols.iter().map(|z| c_out(py, *z))).into_py(py))
}

/// Sections of the (a,b) line bundle on the product P² × P².
#[pyfunction]
fn h0_product(a: i64, b: i64) -> PyResult<i64> {
    ft::h0_product(a, b).map_err(err)
}

/// Sections of the (a,b) line bundle restricted to the flag manifold.
#[pyfunction]
fn h0_flag(a: i64, b: i64) -> PyResult<i64> {
    ft::h0_flag(a, b).map_err(err)
}

/// Triple intersection number of three bidegrees on the flag manifold.
#[pyfunction]
fn triple_product(x: (i64, i64), y: (i64, i64), z: (i64, i64)) -> PyResult<i64> {
    ft::triple_product(
        ft::Bidegree::new(x.0, x.1),
        ft::Bidegree::new(y.0, y.1),
        ft::Bidegree::new(z.0, z.1),
    )
    .map_err(err)
}

/// Self-intersection of the canonical-normalized hyperplane class.
#[pyfunction]
fn c1_squared(a: i64, b: i64) -> PyResult<i64> {
    ft::c1_squared(a, b).map_err(err)
}

/// Number of blown-up points for the degree-d pencil model.
#[pyfunction]
fn blowup_count_1d(d: i64) -> PyResult<i64> {
    ft::blowup_count_1d(d).map_err(err)
}

/// Sharp upper bound for twistor fibers on a smooth (a,b)-surface.
#[pyfunction]
fn max_twistor_lines(a: i64, b: i64) -> PyResult<i64> {
    ft::max_twistor_lines(a, b).map_err(err)
}

/// Upper bound for integral (1,1)-curves in an (a,b) ∩ conjugate system.
#[pyfunction]
fn max_11_curves_in_intersection(a: i64, b: i64) -> PyResult<i64> {
    ft::max_11_curves_in_intersection(a, b).map_err(err)
}

/// Rotation-profile table of the image sphere: {"rho", "samples", ...}.
#[pyfunction]
#[pyo3(signature = (rho, samples=256))]
fn profile_curve(py: Python<'_>, rho: f64, samples: usize) -> PyResult<PyObject> {
    report_out(py, &ft::profile_curve(rho, samples).map_err(err)?)
}

/// Branch-curve profile of the torus family: {"a", "xs", "roots", ...}.
#[pyfunction]
fn torus_profile(py: Python<'_>, a: f64) -> PyResult<PyObject> {
    report_out(py, &ft::torus_profile(a).map_err(err)?)
}

/// First fundamental form coefficients (E, F, G) at (u, v).
#[pyfunction]
fn first_fundamental_form(rho: f64, u: f64, v: f64) -> (f64, f64, f64) {
    ft::first_fundamental_form(rho, u, v)
}

/// Fubini–Study distance between two projective points (or two lines).
#[pyfunction]
#[pyo3(signature = (a, b, flavor="point"))]
fn fubini_study_distance(
    a: &Bound<'_, PyAny>,
    b: &Bound<'_, PyAny>,
    flavor: &str,
) -> PyResult<f64> {
    let fl = flavor_in(flavor)?;
    ft::fubini_study_distance(&pv_in(a, fl)?, &pv_in(b, fl)?).map_err(err)
}

/// Moment-map image (|q₀|², |q₁|², |q₂|²)/Σ of a projective point.
#[pyfunction]
fn moment_map(q: &Bound<'_, PyAny>) -> PyResult<[f64; 3]> {
    ft::moment_map(&pv_in(q, Flavor::Point)?).map_err(err)
}

/// Run the self-verification suite; returns the full report as a dict.
#[pyfunction]
#[pyo3(signature = (seed=42, samples=100))]
fn run_verification(py: Python<'_>, seed: u64, samples: usize) -> PyResult<PyObject> {
    report_out(py, &ft::run_suite(seed, samples))
}

#[pymodule]
fn flagtwistor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Surface>()?;
    m.add_class::<Curve>()?;
    m.add_class::<Fiber>()?;
    m.add_function(wrap_pyfunction!(solve_norm_quadratic, m)?)?;
    m.add_function(wrap_pyfunction!(h0_product, m)?)?;
    m.add_function(wrap_pyfunction!(h0_flag, m)?)?;
    m.add_function(wrap_pyfunction!(triple_product, m)?)?;
    m.add_function(wrap_pyfunction!(c1_squared, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_count_1d, m)?)?;
    m.add_function(wrap_pyfunction!(max_twistor_lines, m)?)?;
    m.add_function(wrap_pyfunction!(max_11_curves_in_intersection, m)?)?;
    m.add_function(wrap_pyfunction!(profile_curve, m)?)?;
    m.add_function(wrap_pyfunction!(torus_profile, m)?)?;
    m.add_function(wrap_pyfunction!(first_fundamental_form, m)?)?;
    m.add_function(wrap_pyfunction!(fubini_study_distance, m)?)?;
    m.add_function(wrap_pyfunction!(moment_map, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
