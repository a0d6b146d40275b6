//! The fiberwise incidence map, its closed-form Jacobian, and the inversion
//! that finds the unique curve of a requested family through a given point.
//!
//! For fixed `t` outside `{0, infinity}` the incidence map sends `(d, a)` to
//! the curve's intersection with the fiber over `t`. Restricted to either
//! open family it is a diffeomorphism onto the off-diagonal part of the
//! fiber, so the inversion below has exactly one solution per family; the
//! two candidates produced by the quadratic branch structure always sit on
//! opposite sides of `|a| = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{eval_line, uncenter, Family, FamilyClass, LineParams, SpacePoint};
use crate::error::{Result, TwistorError};
use crate::sphere::{ChordalTolerance, SpherePoint};
use crate::symmetry::{act_on_params, act_on_space, GroupElement};

/// A point of the blown-up `t = 0` fiber away from the quadric: the base
/// position `d` on the diagonal and the normal direction `v` in the
/// `(x - y, t)` coordinate. `v` is projective, but no admissible parameter
/// produces `v = infinity` (that direction lies inside the quadric).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FiberZeroPoint {
    pub d: SpherePoint,
    pub v: SpherePoint,
}

/// Intermediates of one inversion: the chart value `b`, both quadratic
/// branches `c`, both recovered parameter candidates, and which family was
/// chosen. Near-diagonal inputs are flagged ill-conditioned because the two
/// branches coalesce as `b -> 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverTrace {
    pub b: SpherePoint,
    pub c_candidates: [SpherePoint; 2],
    pub params_candidates: [LineParams; 2],
    pub chosen_family: Family,
    pub ill_conditioned: bool,
}

/// The incidence map: the intersection of the curve `(d, a)` with the fiber
/// over `t`. Defined on the whole parameter space, including both reducible
/// limits; undefined on the `t = 0` and `t = infinity` fibers (those
/// intersections carry blow-up data, see [`fiber_zero_point`]).
pub fn incidence_map(params: &LineParams, t: &SpherePoint) -> Result<SpacePoint> {
    if t.is_zero() || t.is_infinity() {
        return Err(TwistorError::InvalidFiber);
    }
    if params.a().is_infinity() {
        // The vertical part of the a = infinity limit: x constant at the
        // antipode of d, y constant at d.
        let d = params.d();
        return Ok(SpacePoint::new(d.antipodal(), d, *t));
    }
    eval_line(params, t)
}

/// Coordinate chart in which a Jacobian value is expressed. The standard
/// chart is `(d, a)`; the inverted charts replace a coordinate by its
/// reciprocal and are used at (or numerically near) infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JacobianChart {
    Standard,
    InvertedD,
    InvertedA,
    InvertedBoth,
}

/// The Jacobian of the incidence map at `(d, a)` for fixed `t`.
///
/// `real_det` is the determinant of the real 4x4 derivative in coordinates
/// `(Re d, Im d, Re a, Im a) -> (Re x, Im x, Re y, Im y)` of the working
/// chart. In the standard chart it has the closed form
///
/// ```text
///   real_det = R (1+R)^2 (1+|d|^2)^2 (|a|^4 - 1) / (|1 + a conj(d) t|^4 |a + d conj(t)|^4)
/// ```
///
/// with `R = |t|^2`. `density` is the conformally rescaled value
/// `real_det / ((1 + |d|^2)(1 + R))`, the form in which the vanishing locus
/// is usually quoted; both vanish exactly on `|a| = 1`, are negative on
/// `|a| < 1` and positive on `|a| > 1`. `scale` is the positive prefactor
/// (`real_det` without the `|a|^4 - 1` factor), the natural magnitude
/// reference for zero-set tests.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Jacobian {
    pub real_det: f64,
    pub density: f64,
    pub scale: f64,
    pub chart: JacobianChart,
}

/// Affine switch threshold beyond which a coordinate is treated through its
/// inverted chart to avoid overflow in the fourth powers.
const CHART_SWITCH: f64 = 1e60;

/// Evaluates the closed-form Jacobian, selecting the chart per coordinate:
/// inverted only at exact infinity or beyond the overflow threshold, so the
/// standard chart is used on the whole finite working range.
pub fn jacobian(params: &LineParams, t: &SpherePoint) -> Result<Jacobian> {
    if t.is_zero() || t.is_infinity() {
        return Err(TwistorError::InvalidFiber);
    }
    let tau = crate::sphere::stable_div(t.z0(), t.z1());
    let r = tau.norm_sqr();
    if !r.is_finite() || r == 0.0 {
        // |t|^2 leaves the double range: the fiber is indistinguishable
        // from a degenerate one at this precision.
        return Err(TwistorError::ChartUnavailable);
    }

    let d = params.d();
    let invert_d = d.is_infinity() || d.z0().norm() > CHART_SWITCH * d.z1().norm();
    let delta = if invert_d {
        d.z1() / d.z0()
    } else {
        d.z0() / d.z1()
    };

    let a = params.a();
    let invert_a = a.is_infinity() || a.z0().norm() > CHART_SWITCH * a.z1().norm();
    let kappa = if invert_a {
        a.z1() / a.z0()
    } else {
        a.z0() / a.z1()
    };

    // Denominators of the chart form; each pair is the rewriting of
    // |1 + a conj(d) t| and |a + d conj(t)| in the inverted coordinates.
    let (den1, den2) = match (invert_d, invert_a) {
        (false, false) => (
            Complex64::ONE + kappa * delta.conj() * tau,
            kappa + delta * tau.conj(),
        ),
        (true, false) => (
            delta + kappa * tau,
            kappa * delta.conj() + tau.conj(),
        ),
        (false, true) => (
            kappa + delta.conj() * tau,
            Complex64::ONE + kappa * delta * tau.conj(),
        ),
        (true, true) => (
            delta * kappa + tau,
            delta.conj() + kappa * tau.conj(),
        ),
    };
    let n1 = den1.norm_sqr();
    let n2 = den2.norm_sqr();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(TwistorError::ChartUnavailable);
    }

    let one_plus_r = 1.0 + r;
    let conformal = 1.0 + delta.norm_sqr();
    let scale = r * one_plus_r * one_plus_r * conformal * conformal / (n1 * n1 * n2 * n2);
    let sign_factor = if invert_a {
        1.0 - kappa.norm_sqr() * kappa.norm_sqr()
    } else {
        kappa.norm_sqr() * kappa.norm_sqr() - 1.0
    };
    let real_det = scale * sign_factor;
    let chart = match (invert_d, invert_a) {
        (false, false) => JacobianChart::Standard,
        (true, false) => JacobianChart::InvertedD,
        (false, true) => JacobianChart::InvertedA,
        (true, true) => JacobianChart::InvertedBoth,
    };
    Ok(Jacobian {
        real_det,
        density: real_det / (conformal * one_plus_r),
        scale,
        chart,
    })
}

/// Fixed auxiliary rotations used to move an input with `x = infinity` into
/// the finite chart; their poles (1, i, e^{i pi/4}) are pairwise distinct,
/// so at least one rotation keeps both components of any input finite.
fn chart_rotations() -> [GroupElement; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mk = |beta: Complex64| {
        GroupElement::new(Complex64::new(s, 0.0), beta, Complex64::ONE)
            .expect("fixed rotation")
    };
    [
        mk(Complex64::new(s, 0.0)),
        mk(Complex64::new(0.0, s)),
        mk(Complex64::from_polar(s, std::f64::consts::FRAC_PI_4)),
    ]
}

/// Finds the unique parameters in `family` whose curve passes through `p`.
///
/// The inversion runs through the chart variable of the trajectory
/// factorization: with `R = |t|^2`,
///
/// ```text
///   b = (1 + R)(x - y) / (1 + conj(x) y)
/// ```
///
/// then `R / conj(c) - c = b` is solved in polar form. Writing
/// `s = sqrt(|b|^2 + 4R)`, the two branches are `c = r e^{i arg(b)}` with
/// `r = 2R / (|b| + s)` (the cancellation-free form of `(-|b| + s)/2`) and
/// `c = r e^{i arg(-b)}` with `r = (|b| + s)/2`; their radii multiply to
/// `R`, which is why the recovered candidates satisfy `|a| = |c| / |t|` on
/// opposite sides of 1. Each branch yields `d = (x + c)/(1 - conj(x) c)`
/// and `a = (d - x)/(t (1 + x conj(d)))`, via the `x = 1/(a t)` chart when
/// `d` lands at infinity. Both candidates are validated against the forward
/// map; the requested family's candidate is returned with the trace.
pub fn solve_line_through(
    p: &SpacePoint,
    family: Family,
    tol: &ChordalTolerance,
) -> Result<(LineParams, SolverTrace)> {
    if p.t.is_zero() || p.t.is_infinity() {
        return Err(TwistorError::InvalidFiber);
    }
    let eps = tol.epsilon();
    let distance = p.x.chordal_distance(&p.y);
    if distance <= eps {
        return Err(TwistorError::OnDiagonal { distance });
    }

    if p.x.is_infinity() {
        // Conjugate by a fixed rotation that moves both components into the
        // finite chart; the family and t are preserved.
        for g in chart_rotations() {
            let moved = act_on_space(&g, p);
            if !moved.x.is_infinity() && !moved.y.is_infinity() {
                let (params, trace) = solve_line_through(&moved, family, tol)?;
                return Ok((act_on_params(&g.inverse(), &params), trace));
            }
        }
        unreachable!("three rotations with distinct poles cannot all fail");
    }

    let (x0, x1) = (p.x.z0(), p.x.z1());
    let (y0, y1) = (p.y.z0(), p.y.z1());
    let (t0, t1) = (p.t.z0(), p.t.z1());
    let tau = crate::sphere::stable_div(t0, t1);
    let r_sq = tau.norm_sqr();
    if !r_sq.is_finite() || r_sq == 0.0 {
        return Err(TwistorError::InvalidFiber);
    }
    let one_plus_r = 1.0 + r_sq;

    let b = SpherePoint::new(
        one_plus_r * (x0 * y1 - y0 * x1) * x1.conj(),
        x1 * (x1.conj() * y1 + x0.conj() * y0),
    )
    .expect("off-diagonal points with finite x give a valid b");

    // Beyond-range |b| degrades to the same reducible-limit branch as the
    // exact boundary case.
    let c_candidates = match b.to_affine() {
        None => [SpherePoint::zero(), SpherePoint::infinity()],
        Some(b_affine) => {
            let b_mod = b_affine.norm();
            let root = b_mod.hypot(2.0 * r_sq.sqrt());
            let r_small = 2.0 * r_sq / (b_mod + root);
            let r_large = 0.5 * (b_mod + root);
            let phase = b_affine.arg();
            // The second branch has phase arg(-b); negating the complex
            // value keeps the reducible-limit cancellations exact.
            [
                SpherePoint::from_affine(Complex64::from_polar(r_small, phase)),
                SpherePoint::from_affine(-Complex64::from_polar(r_large, phase)),
            ]
        }
    };

    let recover = |c: &SpherePoint| -> LineParams {
        // c = 0 and c = infinity are the reducible limits through x: the
        // constant section at d = x and the a = infinity limit at its
        // antipode. Recognize them structurally instead of relying on
        // floating-point cancellation.
        if c.is_zero() {
            return LineParams::new(p.x, SpherePoint::zero());
        }
        if c.is_infinity() {
            return LineParams::new(p.x.antipodal(), SpherePoint::infinity());
        }
        let d = uncenter(c, &p.x).expect("x is finite here");
        let a = if d.is_infinity() {
            // a = 1/(x t).
            SpherePoint::new(x1 * t1, x0 * t0).expect("x and t are nonzero here")
        } else {
            let (d0, d1) = (d.z0(), d.z1());
            SpherePoint::new(
                (d0 * x1 - x0 * d1) * d1.conj() * t1,
                d1 * (x1 * d1.conj() + x0 * d0.conj()) * t0,
            )
            .expect("finite-d recovery cannot degenerate off the diagonal")
        };
        LineParams::new(d, a)
    };
    let params_candidates = [recover(&c_candidates[0]), recover(&c_candidates[1])];

    // Strict modulus comparison: the solver does not use the K-tolerant
    // classifier, the diagonal guard already excludes the K image.
    let pick_plus = params_candidates[0].a_modulus() <= params_candidates[1].a_modulus();
    let index = match (family, pick_plus) {
        (Family::Mplus, true) | (Family::Mminus, false) => 0,
        _ => 1,
    };
    let chosen = params_candidates[index];

    let trace = SolverTrace {
        b,
        c_candidates,
        params_candidates,
        chosen_family: family,
        ill_conditioned: distance <= 100.0 * eps,
    };

    let roundtrip = incidence_map(&chosen, &p.t)
        .map(|q| p.x.chordal_distance(&q.x).max(p.y.chordal_distance(&q.y)))
        .unwrap_or(f64::INFINITY);
    let tolerance = 10.0 * eps;
    if roundtrip > tolerance {
        return Err(TwistorError::NumericalFailure {
            roundtrip,
            tolerance,
            trace: Box::new(trace),
        });
    }
    Ok((chosen, trace))
}

/// Normal-coordinate factor for the fiber at `d`: `1 + |d|^2` in the unit
/// disk chart, `1 + |1/d|^2` outside it. Equal to the squared Euclidean
/// norm of the canonical representative, so it is chart-continuous and
/// never overflows.
fn fiber_factor(d: &SpherePoint) -> f64 {
    d.rep_norm_sqr()
}

/// The intersection of the curve `(d, a)` with the blown-up `t = 0` fiber:
/// the normal direction
///
/// ```text
///   v = (1 + |d|^2) (a - 1/conj(a))
/// ```
///
/// for interior `a` (in the reciprocal-`d` chart when `|d| > 1`, which
/// replaces the factor by `1 + |1/d|^2`; the `d = infinity` case follows
/// from the `x = 1/(a t)` form of the curve by the same computation). The
/// `a = 0` section meets the fiber in the trivial-section direction `v = 0`.
/// Curves with `|a| = 1` lie inside the quadric and carry no normal
/// coordinate; `v` is never infinite for admissible parameters.
pub fn fiber_zero_point(params: &LineParams) -> Result<FiberZeroPoint> {
    match params.classify() {
        FamilyClass::C2 => Err(TwistorError::UnsupportedClass {
            class: FamilyClass::C2,
        }),
        FamilyClass::K => Err(TwistorError::LiesOnQ),
        FamilyClass::C1 => Ok(FiberZeroPoint {
            d: params.d(),
            v: SpherePoint::zero(),
        }),
        FamilyClass::A1 | FamilyClass::A2 => {
            let a = params.a();
            let (a0, a1) = (a.z0(), a.z1());
            // a - 1/conj(a) = (|a|^2 - 1)/conj(a), homogeneously; the phase
            // of a1 is split from its modulus so extreme |a| cannot
            // underflow the representative.
            let a1_mod = a1.norm();
            let a1_phase = a1.conj() / a1_mod;
            let v = SpherePoint::new(
                fiber_factor(&params.d()) * (a0.norm_sqr() - a1.norm_sqr()) * a1_phase,
                a1_mod * a0.conj(),
            )
            .expect("interior a gives a finite nonzero v");
            Ok(FiberZeroPoint { d: params.d(), v })
        }
    }
}

/// Inverts [`fiber_zero_point`] within the requested family.
///
/// With `w = v / (1 + |d|^2)` (same chart factor as the forward map), the
/// modulus `s` of `a` solves `s - 1/s = +-|w|`; the cancellation-free
/// branches are `s = 2 / (|w| + sqrt(|w|^2 + 4))` with phase `arg(-w)` for
/// the open disk, and `s = (|w| + sqrt(|w|^2 + 4)) / 2` with phase `arg(w)`
/// outside it. `w = 0` returns the reducible limit of the family.
pub fn solve_fiber_zero(fp: &FiberZeroPoint, family: Family) -> Result<LineParams> {
    if fp.v.is_infinity() {
        return Err(TwistorError::LiesOnQ);
    }
    let w = crate::sphere::stable_div(fp.v.z0(), fp.v.z1()) / fiber_factor(&fp.d);
    if w == Complex64::ZERO {
        let a = match family {
            Family::Mplus => SpherePoint::zero(),
            Family::Mminus => SpherePoint::infinity(),
        };
        return Ok(LineParams::new(fp.d, a));
    }
    if !w.is_finite() {
        // |v| beyond the double range: the solution modulus rounds to the
        // reducible limit of the opposite side.
        let a = match family {
            Family::Mplus => SpherePoint::zero(),
            Family::Mminus => SpherePoint::infinity(),
        };
        return Ok(LineParams::new(fp.d, a));
    }
    let w_mod = w.norm();
    let root = w_mod.hypot(2.0);
    let a = match family {
        Family::Mplus => Complex64::from_polar(2.0 / (w_mod + root), (-w).arg()),
        Family::Mminus => Complex64::from_polar(0.5 * (w_mod + root), w.arg()),
    };
    Ok(LineParams::new(fp.d, SpherePoint::from_affine(a)))
}
