//! Python bindings: the sphere-point type plus thin functional wrappers
//! over curve evaluation, the incidence solvers, the symmetry action and
//! the verification harness.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use twistor_lines as tl;

fn err(e: tl::TwistorError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_family(name: &str) -> PyResult<tl::Family> {
    match name {
        "m+" => Ok(tl::Family::Mplus),
        "m-" => Ok(tl::Family::Mminus),
        _ => Err(PyValueError::new_err(format!(
            "family must be 'm+' or 'm-', got {name:?}"
        ))),
    }
}

/// A point of the projective line; either a finite complex value or the
/// point at infinity.
#[pyclass(name = "SpherePoint", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySpherePoint {
    inner: tl::SpherePoint,
}

#[pymethods]
impl PySpherePoint {
    #[new]
    fn new(z: Complex64) -> PyResult<Self> {
        if !z.is_finite() {
            return Err(PyValueError::new_err(
                "use SpherePoint.infinity() for the point at infinity",
            ));
        }
        Ok(PySpherePoint {
            inner: tl::SpherePoint::from_affine(z),
        })
    }

    #[staticmethod]
    fn infinity() -> Self {
        PySpherePoint {
            inner: tl::SpherePoint::infinity(),
        }
    }

    #[getter]
    fn affine(&self) -> Option<Complex64> {
        self.inner.to_affine()
    }

    #[getter]
    fn is_infinity(&self) -> bool {
        self.inner.is_infinity()
    }

    fn antipodal(&self) -> Self {
        PySpherePoint {
            inner: self.inner.antipodal(),
        }
    }

    fn chordal_distance(&self, other: &PySpherePoint) -> f64 {
        self.inner.chordal_distance(&other.inner)
    }

    fn __repr__(&self) -> String {
        match self.inner.to_affine() {
            Some(z) => format!("SpherePoint({}{:+}j)", z.re, z.im),
            None => "SpherePoint.infinity()".to_string(),
        }
    }
}

fn wrap(p: tl::SpherePoint) -> PySpherePoint {
    PySpherePoint { inner: p }
}

/// Evaluate the curve with parameters (d, a) at t; returns (x, y, t).
#[pyfunction]
fn eval_line(
    d: &PySpherePoint,
    a: &PySpherePoint,
    t: &PySpherePoint,
) -> PyResult<(PySpherePoint, PySpherePoint, PySpherePoint)> {
    let p = tl::eval_line(&tl::LineParams::new(d.inner, a.inner), &t.inner).map_err(err)?;
    Ok((wrap(p.x), wrap(p.y), wrap(p.t)))
}

/// Family classification of (d, a): one of "A1", "A2", "K", "C1", "C2".
#[pyfunction]
fn classify(d: &PySpherePoint, a: &PySpherePoint) -> String {
    format!("{:?}", tl::LineParams::new(d.inner, a.inner).classify())
}

/// Solve for the unique curve of `family` ("m+" or "m-") through (x, y, t);
/// returns (d, a).
#[pyfunction]
fn solve_line(
    x: &PySpherePoint,
    y: &PySpherePoint,
    t: &PySpherePoint,
    family: &str,
) -> PyResult<(PySpherePoint, PySpherePoint)> {
    let fam = parse_family(family)?;
    let p = tl::SpacePoint::new(x.inner, y.inner, t.inner);
    let (params, _) =
        tl::solve_line_through(&p, fam, &tl::ChordalTolerance::default()).map_err(err)?;
    Ok((wrap(params.d()), wrap(params.a())))
}

/// Normal direction of the curve (d, a) in the blown-up t = 0 fiber.
#[pyfunction]
fn fiber_zero(d: &PySpherePoint, a: &PySpherePoint) -> PyResult<PySpherePoint> {
    let fp = tl::fiber_zero_point(&tl::LineParams::new(d.inner, a.inner)).map_err(err)?;
    Ok(wrap(fp.v))
}

/// Invert the t = 0 fiber coordinate within a family; returns (d, a).
#[pyfunction]
fn solve_fiber_zero(
    d: &PySpherePoint,
    v: &PySpherePoint,
    family: &str,
) -> PyResult<(PySpherePoint, PySpherePoint)> {
    let fam = parse_family(family)?;
    let fp = tl::FiberZeroPoint {
        d: d.inner,
        v: v.inner,
    };
    let params = tl::solve_fiber_zero(&fp, fam).map_err(err)?;
    Ok((wrap(params.d()), wrap(params.a())))
}

/// Jacobian of the incidence map: (real_det, density, scale, chart).
#[pyfunction]
fn jacobian(
    d: &PySpherePoint,
    a: &PySpherePoint,
    t: &PySpherePoint,
) -> PyResult<(f64, f64, f64, String)> {
    let j = tl::jacobian(&tl::LineParams::new(d.inner, a.inner), &t.inner).map_err(err)?;
    Ok((j.real_det, j.density, j.scale, format!("{:?}", j.chart)))
}

/// The y on the trajectory curve of d over t through x.
#[pyfunction]
fn trajectory(
    d: &PySpherePoint,
    t: &PySpherePoint,
    x: &PySpherePoint,
) -> PyResult<PySpherePoint> {
    Ok(wrap(tl::eval_trajectory(&d.inner, &t.inner, &x.inner).map_err(err)?))
}

/// The anti-holomorphic involution (x, y, t) -> (-1/conj(y), -1/conj(x), -1/conj(t)).
#[pyfunction]
fn real_structure(
    x: &PySpherePoint,
    y: &PySpherePoint,
    t: &PySpherePoint,
) -> (PySpherePoint, PySpherePoint, PySpherePoint) {
    let p = tl::real_structure(&tl::SpacePoint::new(x.inner, y.inner, t.inner));
    (wrap(p.x), wrap(p.y), wrap(p.t))
}

/// The family-exchanging involution (d, a) -> (d, 1/conj(a)).
#[pyfunction]
fn swap_involution(d: &PySpherePoint, a: &PySpherePoint) -> (PySpherePoint, PySpherePoint) {
    let p = tl::swap_involution(&tl::LineParams::new(d.inner, a.inner));
    (wrap(p.d()), wrap(p.a()))
}

/// Action of the rotation (alpha, beta) and phase g3 on parameters (d, a).
#[pyfunction]
fn act_on_params(
    alpha: Complex64,
    beta: Complex64,
    g3: Complex64,
    d: &PySpherePoint,
    a: &PySpherePoint,
) -> PyResult<(PySpherePoint, PySpherePoint)> {
    let g = tl::GroupElement::new(alpha, beta, g3).map_err(err)?;
    let p = tl::act_on_params(&g, &tl::LineParams::new(d.inner, a.inner));
    Ok((wrap(p.d()), wrap(p.a())))
}

/// Group element carrying one K parameter to another: (alpha, beta, g3).
#[pyfunction]
fn transport_on_k(
    src_d: &PySpherePoint,
    src_a: &PySpherePoint,
    dst_d: &PySpherePoint,
    dst_a: &PySpherePoint,
) -> PyResult<(Complex64, Complex64, Complex64)> {
    let g = tl::transport_on_k(
        &tl::LineParams::new(src_d.inner, src_a.inner),
        &tl::LineParams::new(dst_d.inner, dst_a.inner),
    )
    .map_err(err)?;
    Ok((g.alpha(), g.beta(), g.g3()))
}

/// Structured reducible limit at d; direction is "zero" or "infinity".
/// Returned as a JSON string.
#[pyfunction]
fn limit_curve(d: &PySpherePoint, direction: &str) -> PyResult<String> {
    let dir = match direction {
        "zero" => tl::LimitDirection::TowardZero,
        "infinity" | "inf" => tl::LimitDirection::TowardInfinity,
        _ => {
            return Err(PyValueError::new_err(
                "direction must be 'zero' or 'infinity'",
            ))
        }
    };
    serde_json_string(&tl::limit_curve(&d.inner, dir))
}

fn serde_json_string<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_value(value)
        .and_then(|v| serde_json::to_string(&v))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Run the verification suites; returns (passed, report_json).
#[pyfunction]
#[pyo3(signature = (samples=2000, seed=42, shells=vec![0.5, 1.0, 2.0], suite=None))]
fn verify(
    samples: usize,
    seed: u64,
    shells: Vec<f64>,
    suite: Option<&str>,
) -> PyResult<(bool, String)> {
    let plan = tl::VerificationPlan {
        seed,
        samples_per_suite: samples,
        t_shells: shells,
        tolerances: Default::default(),
    };
    let report = match suite {
        Some(name) => {
            let s = tl::verify_suite(&plan, name).map_err(err)?;
            tl::VerificationReport {
                plan: plan.clone(),
                status: s.status,
                suites: vec![s],
            }
        }
        None => tl::verify_all(&plan).map_err(err)?,
    };
    Ok((report.status == tl::Status::Pass, report.to_json()))
}

#[pymodule]
fn twistor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpherePoint>()?;
    m.add_function(wrap_pyfunction!(eval_line, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(solve_line, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_zero, m)?)?;
    m.add_function(wrap_pyfunction!(solve_fiber_zero, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(real_structure, m)?)?;
    m.add_function(wrap_pyfunction!(swap_involution, m)?)?;
    m.add_function(wrap_pyfunction!(act_on_params, m)?)?;
    m.add_function(wrap_pyfunction!(transport_on_k, m)?)?;
    m.add_function(wrap_pyfunction!(limit_curve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
