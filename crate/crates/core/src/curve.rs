//! The parametrized real-curve families of degree (1,1,1) and (0,0,1) in
//! P^1 x P^1 x P^1, their trajectory curves, and the reducible degeneration
//! limits of the family parameter `a` at 0 and infinity.
//!
//! A parameter pair `(d, a)` describes the curve
//!
//! ```text
//!   x(t) = (d - a t) / (1 + a conj(d) t),   y(t) = (conj(a) d - t) / (conj(a) + conj(d) t)
//! ```
//!
//! through `(d, d, 0)`, with the chart form `x = 1/(a t)`, `y = conj(a)/t`
//! at `d = infinity` and the constant section `x = d`, `y = -1/conj(d)` at
//! `a = 0`. Everything is evaluated homogeneously, so `t = 0` and
//! `t = infinity` need no special treatment.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwistorError};
use crate::sphere::{ChordalTolerance, FractionalMap, SpherePoint};

/// Classification of a parameter pair by the modulus of `a`.
///
/// `A1` and `A2` are the open interiors `0 < |a| < 1` and `1 < |a| < inf`;
/// `K` is the unit circle (curves inside the quadric Q); `C1` and `C2` are
/// the reducible limits `a = 0` and `a = infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyClass {
    A1,
    A2,
    K,
    C1,
    C2,
}

/// The two connected open families: `Mplus = A1 u C1`, `Mminus = A2 u C2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "m+")]
    Mplus,
    #[serde(rename = "m-")]
    Mminus,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Mplus => write!(f, "m+"),
            Family::Mminus => write!(f, "m-"),
        }
    }
}

/// A parameter `(d, a)` of the curve family. Both entries are projective,
/// so the `a = 0` and `a = infinity` limits live in the same type as the
/// interior points and the closed families are iterable as one space.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LineParams {
    d: SpherePoint,
    a: SpherePoint,
}

impl LineParams {
    /// Default tolerance on `| |a| - 1 |` for classifying the K stratum.
    pub const CLASS_TOLERANCE: f64 = 1e-9;

    pub fn new(d: SpherePoint, a: SpherePoint) -> Self {
        LineParams { d, a }
    }

    pub fn from_affine(d: Complex64, a: Complex64) -> Self {
        LineParams {
            d: SpherePoint::from_affine(d),
            a: SpherePoint::from_affine(a),
        }
    }

    pub fn d(&self) -> SpherePoint {
        self.d
    }

    pub fn a(&self) -> SpherePoint {
        self.a
    }

    /// Modulus of the affine value of `a`; infinite for the C2 limit.
    pub fn a_modulus(&self) -> f64 {
        if self.a.is_infinity() {
            f64::INFINITY
        } else {
            self.a.z0().norm() / self.a.z1().norm()
        }
    }

    pub fn classify(&self) -> FamilyClass {
        self.classify_with(Self::CLASS_TOLERANCE)
    }

    /// Total and exclusive classification; `tol` bounds `| |a| - 1 |`.
    pub fn classify_with(&self, tol: f64) -> FamilyClass {
        if self.a.is_zero() {
            FamilyClass::C1
        } else if self.a.is_infinity() {
            FamilyClass::C2
        } else {
            let m = self.a_modulus();
            if (m - 1.0).abs() <= tol {
                FamilyClass::K
            } else if m < 1.0 {
                FamilyClass::A1
            } else {
                FamilyClass::A2
            }
        }
    }

    /// Connected family membership; `None` on the K stratum.
    pub fn family(&self) -> Option<Family> {
        match self.classify() {
            FamilyClass::A1 | FamilyClass::C1 => Some(Family::Mplus),
            FamilyClass::A2 | FamilyClass::C2 => Some(Family::Mminus),
            FamilyClass::K => None,
        }
    }
}

/// A point of the product P^1 x P^1 x P^1.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpacePoint {
    pub x: SpherePoint,
    pub y: SpherePoint,
    pub t: SpherePoint,
}

impl SpacePoint {
    pub fn new(x: SpherePoint, y: SpherePoint, t: SpherePoint) -> Self {
        SpacePoint { x, y, t }
    }
}

fn pt(z0: Complex64, z1: Complex64) -> SpherePoint {
    SpherePoint::new(z0, z1).expect("curve evaluation cannot degenerate for admissible parameters")
}

/// Evaluates the curve with parameters `(d, a)` at `t`.
///
/// The `t`-component of the result is the input `t`. The `a = 0` section is
/// the constant `(d, -1/conj(d))`; class C2 is rejected because its curve is
/// reducible; evaluate its vertical part through [`limit_curve`].
///
/// At `t = 0` this returns the diagonal point `(d, d, 0)` and at
/// `t = infinity` the antipodal diagonal point, for every interior `a`.
pub fn eval_line(params: &LineParams, t: &SpherePoint) -> Result<SpacePoint> {
    let a = params.a();
    let d = params.d();
    if a.is_infinity() {
        return Err(TwistorError::UnsupportedClass {
            class: FamilyClass::C2,
        });
    }
    if a.is_zero() {
        return Ok(SpacePoint::new(d, d.antipodal(), *t));
    }

    let (a0, a1) = (a.z0(), a.z1());
    let (t0, t1) = (t.z0(), t.z1());
    let (x, y) = if d.is_infinity() {
        // d = infinity chart: x = 1/(a t), y = conj(a)/t.
        (
            pt(a1 * t1, a0 * t0),
            pt(a0.conj() * t1, a1.conj() * t0),
        )
    } else if d.z0().norm() <= d.z1().norm() {
        // |d| <= 1: affine d is well-conditioned.
        let dd = d.z0() / d.z1();
        let dc = dd.conj();
        (
            pt(dd * a1 * t1 - a0 * t0, a1 * t1 + a0 * dc * t0),
            pt(
                a0.conj() * dd * t1 - a1.conj() * t0,
                a0.conj() * t1 + a1.conj() * dc * t0,
            ),
        )
    } else {
        // |d| > 1: work with e = 1/d and the unit phase u = conj(e)/e, which
        // is the homogeneous rewriting of the same curve. The phase is
        // computed at unit scale; naive division underflows for |e| below
        // 1e-154.
        let e = d.z1() / d.z0();
        let ec = e.conj();
        let eu = e / e.norm();
        let u = eu.conj() / eu;
        (
            pt(u * a1 * t1 - ec * a0 * t0, ec * a1 * t1 + a0 * t0),
            pt(
                a0.conj() * t1 - a1.conj() * e * t0,
                a0.conj() * e * t1 + a1.conj() * u.conj() * t0,
            ),
        )
    };
    Ok(SpacePoint::new(x, y, *t))
}

/// Whether a point lies on the quadric `Q` (the diagonal `x = y` times the
/// last factor), within the chordal tolerance.
pub fn on_q(p: &SpacePoint, tol: &ChordalTolerance) -> bool {
    p.x.chordal_distance(&p.y) <= tol.epsilon()
}

/// The anti-holomorphic fractional map `x -> y` whose graph is the
/// trajectory curve swept in the fiber over `t` by the curves through
/// `(d, d, 0)`:
///
/// ```text
///   y = (-d (1+R) conj(x) + (|d|^2 - R)) / ((|d|^2 R - 1) conj(x) + conj(d) (1+R)),   R = |t|^2.
/// ```
///
/// Depends on `t` only through `R`. Fixes the circle
/// `|x - d| / |conj(d) x + 1| = |t|` pointwise and is nondegenerate for
/// every `d` (including infinity, where it reduces to `y = 1/(R conj(x))`).
pub fn trajectory_map(d: &SpherePoint, t: &SpherePoint) -> Result<FractionalMap> {
    if t.is_zero() || t.is_infinity() {
        return Err(TwistorError::InvalidFiber);
    }
    let r = (t.z0().norm() / t.z1().norm()).powi(2);
    trajectory_map_from_radius_sq(d, r)
}

/// Same as [`trajectory_map`] with `R = |t|^2` given directly.
pub fn trajectory_map_from_radius_sq(d: &SpherePoint, radius_sq: f64) -> Result<FractionalMap> {
    if !radius_sq.is_finite() || radius_sq <= 0.0 {
        return Err(TwistorError::InvalidRadius(radius_sq));
    }
    let (d0, d1) = (d.z0(), d.z1());
    let n0 = d0.norm_sqr();
    let n1 = d1.norm_sqr();
    let one_plus_r = 1.0 + radius_sq;
    FractionalMap::new(
        -d0 * d1.conj() * one_plus_r,
        Complex64::new(n0 - radius_sq * n1, 0.0),
        Complex64::new(radius_sq * n0 - n1, 0.0),
        d0.conj() * d1 * one_plus_r,
        true,
    )
}

/// Evaluates the trajectory curve: the `y` with `(x, y)` on the trajectory
/// of `d` in the fiber over `t`.
pub fn eval_trajectory(d: &SpherePoint, t: &SpherePoint, x: &SpherePoint) -> Result<SpherePoint> {
    Ok(trajectory_map(d, t)?.apply(x))
}

/// The trajectory evaluated through its two-step factorization
///
/// ```text
///   b = R / conj(c) - c,   y = -(b - x (1 + R)) / (conj(x) b + (1 + R)),
/// ```
///
/// where `c` is the coordinate of `d` in the unitary chart centered at `x`
/// (see [`recenter`]). The first map contracts the circle `|c| = sqrt(R)`
/// to `b = 0`; the second sends `b = 0` to `x`. Agrees with
/// [`eval_trajectory`] when `c = recenter(d, x)` and `R = |t|^2`.
pub fn eval_trajectory_factored(
    c: &SpherePoint,
    x: &SpherePoint,
    radius_sq: f64,
) -> Result<SpherePoint> {
    if !radius_sq.is_finite() || radius_sq <= 0.0 {
        return Err(TwistorError::InvalidRadius(radius_sq));
    }
    let b = if c.is_zero() || c.is_infinity() {
        SpherePoint::infinity()
    } else if c.z0().norm() <= c.z1().norm() {
        let cc = c.z0() / c.z1();
        pt(
            Complex64::new(radius_sq - cc.norm_sqr(), 0.0),
            cc.conj(),
        )
    } else {
        let g = c.z1() / c.z0();
        pt(Complex64::new(radius_sq * g.norm_sqr() - 1.0, 0.0), g)
    };

    let one_plus_r = Complex64::new(1.0 + radius_sq, 0.0);
    let map = if x.is_infinity() {
        // Real-direction limit convention at x = infinity: y = (1 + R) / b.
        FractionalMap::new(
            Complex64::ZERO,
            one_plus_r,
            Complex64::ONE,
            Complex64::ZERO,
            false,
        )?
    } else {
        let (x0, x1) = (x.z0(), x.z1());
        let n1 = x1.norm_sqr();
        FractionalMap::new(
            Complex64::new(-n1, 0.0),
            x0 * x1.conj() * one_plus_r,
            x0.conj() * x1,
            one_plus_r * n1,
            false,
        )?
    };
    Ok(map.apply(&b))
}

/// Coordinate of `d` in the unitary chart centered at `x`:
/// `c = (d - x) / (conj(x) d + 1)`. Holomorphic and nondegenerate in `d`;
/// undefined when the chart center is infinity.
pub fn recenter(d: &SpherePoint, x: &SpherePoint) -> Result<SpherePoint> {
    if x.is_infinity() {
        return Err(TwistorError::ChartUnavailable);
    }
    let (d0, d1) = (d.z0(), d.z1());
    let (x0, x1) = (x.z0(), x.z1());
    Ok(pt(
        (d0 * x1 - x0 * d1) * x1.conj(),
        (x0.conj() * d0 + x1.conj() * d1) * x1,
    ))
}

/// Inverse of [`recenter`]: `d = (x + c) / (1 - conj(x) c)`.
pub fn uncenter(c: &SpherePoint, x: &SpherePoint) -> Result<SpherePoint> {
    if x.is_infinity() {
        return Err(TwistorError::ChartUnavailable);
    }
    let (c0, c1) = (c.z0(), c.z1());
    let (x0, x1) = (x.z0(), x.z1());
    Ok(pt(
        (x0 * c1 + c0 * x1) * x1.conj(),
        (x1.conj() * c1 - x0.conj() * c0) * x1,
    ))
}

/// CSV rows `(t_re, t_im, x_re, x_im, y_re, y_im)` of the curve sampled at
/// the given fiber parameters, with the literal `inf` for points at
/// infinity. This is the wire format consumed by plotting front ends.
pub fn curve_csv(params: &LineParams, ts: &[SpherePoint]) -> Result<String> {
    let cell = |p: &SpherePoint| match p.to_affine() {
        Some(z) => (format!("{}", z.re + 0.0), format!("{}", z.im + 0.0)),
        None => ("inf".to_string(), "inf".to_string()),
    };
    let mut out = String::from("t_re,t_im,x_re,x_im,y_re,y_im\n");
    for t in ts {
        let p = eval_line(params, t)?;
        let (tr, ti) = cell(&p.t);
        let (xr, xi) = cell(&p.x);
        let (yr, yi) = cell(&p.y);
        out.push_str(&format!("{tr},{ti},{xr},{xi},{yr},{yi}\n"));
    }
    Ok(out)
}

/// Direction in which the family parameter `a` degenerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitDirection {
    #[serde(rename = "zero")]
    TowardZero,
    #[serde(rename = "infinity")]
    TowardInfinity,
}

/// One irreducible piece of a reducible limit: its degree triple in
/// `H_2(P^1 x P^1 x P^1)` and the point anchoring it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CurveComponent {
    pub degree: [u32; 3],
    pub anchor: SpacePoint,
}

/// The structured limit of the curve family as `a -> 0` or `a -> infinity`:
/// a vertical degree-(0,0,1) component plus two ruling components of degrees
/// (1,0,0) and (0,1,0). The pieces are connected through the anchors; only
/// degrees and anchors are recorded, not parametrizations.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReducibleLimit {
    pub direction: LimitDirection,
    pub vertical: LineParams,
    pub extra_components: [CurveComponent; 2],
}

impl ReducibleLimit {
    /// Degrees of the two extra components in anchor order (first the one
    /// through the diagonal at `t = 0`, then the one at `t = infinity`).
    /// The two directions always produce different patterns, which is what
    /// keeps the limits of the two families apart.
    pub fn degree_pattern(&self) -> [[u32; 3]; 2] {
        [
            self.extra_components[0].degree,
            self.extra_components[1].degree,
        ]
    }
}

/// The reducible limit of the curves through `(d, d, 0)` as `a` degenerates.
///
/// Toward zero the vertical part is the constant section at `d` and the
/// ruling degrees at the two anchors are `(1,0,0)` and `(0,1,0)`; toward
/// infinity the vertical part sits over `-1/conj(d)` and the ruling degrees
/// swap. Anchors are `(d, d, 0)` and its antipodal image.
pub fn limit_curve(d: &SpherePoint, direction: LimitDirection) -> ReducibleLimit {
    let anti = d.antipodal();
    let anchor_zero = SpacePoint::new(*d, *d, SpherePoint::zero());
    let anchor_inf = SpacePoint::new(anti, anti, SpherePoint::infinity());
    match direction {
        LimitDirection::TowardZero => ReducibleLimit {
            direction,
            vertical: LineParams::new(*d, SpherePoint::zero()),
            extra_components: [
                CurveComponent {
                    degree: [1, 0, 0],
                    anchor: anchor_zero,
                },
                CurveComponent {
                    degree: [0, 1, 0],
                    anchor: anchor_inf,
                },
            ],
        },
        LimitDirection::TowardInfinity => ReducibleLimit {
            direction,
            vertical: LineParams::new(anti, SpherePoint::zero()),
            extra_components: [
                CurveComponent {
                    degree: [0, 1, 0],
                    anchor: anchor_zero,
                },
                CurveComponent {
                    degree: [1, 0, 0],
                    anchor: anchor_inf,
                },
            ],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_affine(p: &SpherePoint, expected: Complex64, tol: f64) {
        let got = p.to_affine().expect("finite");
        assert!(
            (got - expected).norm() <= tol,
            "expected {expected}, got {got}"
        );
    }

    #[test]
    fn worked_value_at_d0_a_half_t1() {
        let params = LineParams::from_affine(c(0.0, 0.0), c(0.5, 0.0));
        let p = eval_line(&params, &SpherePoint::one()).unwrap();
        assert_affine(&p.x, c(-0.5, 0.0), 1e-15);
        assert_affine(&p.y, c(-2.0, 0.0), 1e-15);
    }

    #[test]
    fn curves_pass_the_diagonal_at_t_zero_and_infinity() {
        for (d, a) in [
            (c(0.3, -0.4), c(0.5, 0.1)),
            (c(2.0, 1.0), c(0.0, 3.0)),
            (c(-1.0, 0.0), c(0.9, 0.0)),
        ] {
            let params = LineParams::from_affine(d, a);
            let p0 = eval_line(&params, &SpherePoint::zero()).unwrap();
            assert!(p0.x.chordal_distance(&params.d()) < 1e-14);
            assert!(p0.y.chordal_distance(&params.d()) < 1e-14);
            let pi = eval_line(&params, &SpherePoint::infinity()).unwrap();
            let anti = params.d().antipodal();
            assert!(pi.x.chordal_distance(&anti) < 1e-14);
            assert!(pi.y.chordal_distance(&anti) < 1e-14);
        }
    }

    #[test]
    fn d_infinity_chart_matches_its_closed_form() {
        // x = 1/(a t), y = conj(a)/t with d = infinity.
        let params = LineParams::new(SpherePoint::infinity(), SpherePoint::from_re_im(2.0, 0.0));
        let p = eval_line(&params, &SpherePoint::one()).unwrap();
        assert_affine(&p.x, c(0.5, 0.0), 1e-15);
        assert_affine(&p.y, c(2.0, 0.0), 1e-15);
    }

    #[test]
    fn large_d_agrees_with_the_unit_disk_chart_formula() {
        // Cross-check the |d| > 1 chart against direct affine evaluation.
        let d = c(3.0, -4.0);
        let a = c(0.4, 0.2);
        let t = c(1.3, 0.7);
        let params = LineParams::from_affine(d, a);
        let p = eval_line(&params, &SpherePoint::from_affine(t)).unwrap();
        let x = (d - a * t) / (1.0 + a * d.conj() * t);
        let y = (a.conj() * d - t) / (a.conj() + d.conj() * t);
        assert_affine(&p.x, x, 1e-13);
        assert_affine(&p.y, y, 1e-13);
    }

    #[test]
    fn vertical_section_is_constant() {
        let d = SpherePoint::from_re_im(0.0, 0.0);
        let params = LineParams::new(d, SpherePoint::zero());
        for t in [SpherePoint::zero(), SpherePoint::one(), SpherePoint::infinity()] {
            let p = eval_line(&params, &t).unwrap();
            assert!(p.x.chordal_distance(&d) < 1e-15);
            assert!(p.y.is_infinity(), "y = -1/conj(0) is infinity");
        }
    }

    #[test]
    fn c2_is_rejected_by_eval_line() {
        let params = LineParams::new(SpherePoint::zero(), SpherePoint::infinity());
        assert!(matches!(
            eval_line(&params, &SpherePoint::one()),
            Err(TwistorError::UnsupportedClass {
                class: FamilyClass::C2
            })
        ));
    }

    #[test]
    fn unit_modulus_a_lands_on_q() {
        let tol = ChordalTolerance::default();
        let theta: f64 = 1.234;
        let params = LineParams::from_affine(c(0.7, -0.1), c(theta.cos(), theta.sin()));
        for t in [c(1.0, 0.0), c(0.3, 2.0), c(-5.0, 1.0)] {
            let p = eval_line(&params, &SpherePoint::from_affine(t)).unwrap();
            assert!(on_q(&p, &tol));
        }
        let off = eval_line(
            &LineParams::from_affine(c(0.0, 0.0), c(0.5, 0.0)),
            &SpherePoint::one(),
        )
        .unwrap();
        assert!(!on_q(&off, &tol));
    }

    #[test]
    fn trajectory_at_the_origin_is_inversion_in_the_unit_circle() {
        // d = 0, R = 1 reduces to y = 1/conj(x).
        let d = SpherePoint::zero();
        let t = SpherePoint::one();
        for x in [c(-0.5, 0.0), c(0.3, 0.8), c(2.0, -1.0)] {
            let y = eval_trajectory(&d, &t, &SpherePoint::from_affine(x)).unwrap();
            assert_affine(&y, 1.0 / x.conj(), 1e-14);
        }
    }

    #[test]
    fn trajectory_contains_the_curve_points() {
        for (d, a, t) in [
            (c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)),
            (c(1.2, -0.3), c(0.4, 1.9), c(0.5, 0.5)),
            (c(-0.2, 0.9), c(3.0, 0.0), c(2.0, -1.0)),
        ] {
            let params = LineParams::from_affine(d, a);
            let tp = SpherePoint::from_affine(t);
            let p = eval_line(&params, &tp).unwrap();
            let y = eval_trajectory(&params.d(), &tp, &p.x).unwrap();
            assert!(y.chordal_distance(&p.y) < 1e-12);
        }
    }

    #[test]
    fn trajectory_fixes_its_contracted_circle() {
        // Points with |x - d| / |conj(d) x + 1| = |t| map to themselves.
        let d = c(0.4, -0.7);
        let t = c(0.9, 0.3);
        let r = (t.norm_sqr()).sqrt();
        // Solve for x on the circle: x = d + s*(conj(d)x + 1) with |s| = r.
        for phase in [0.0f64, 1.0, 2.5] {
            let s = Complex64::from_polar(r, phase);
            // x - d = s (conj(d) x + 1)  =>  x (1 - s conj(d)) = d + s.
            let x = (d + s) / (1.0 - s * d.conj());
            let xp = SpherePoint::from_affine(x);
            let y = eval_trajectory(
                &SpherePoint::from_affine(d),
                &SpherePoint::from_affine(t),
                &xp,
            )
            .unwrap();
            assert!(y.chordal_distance(&xp) < 1e-12);
        }
    }

    #[test]
    fn trajectory_depends_on_t_only_through_its_modulus() {
        let d = SpherePoint::from_re_im(0.7, -0.3);
        let x = SpherePoint::from_re_im(-1.1, 0.4);
        let r: f64 = 1.7;
        let mut images = Vec::new();
        for phase in [0.0, 0.9, 2.8] {
            let t = SpherePoint::from_affine(Complex64::from_polar(r, phase));
            images.push(eval_trajectory(&d, &t, &x).unwrap());
        }
        for y in &images[1..] {
            assert!(y.chordal_distance(&images[0]) < 1e-14);
        }
        let via_radius = trajectory_map_from_radius_sq(&d, r * r).unwrap().apply(&x);
        assert!(via_radius.chordal_distance(&images[0]) < 1e-14);
    }

    #[test]
    fn trajectory_rejects_degenerate_fibers() {
        let d = SpherePoint::zero();
        assert!(matches!(
            eval_trajectory(&d, &SpherePoint::zero(), &SpherePoint::one()),
            Err(TwistorError::InvalidFiber)
        ));
        assert!(matches!(
            eval_trajectory(&d, &SpherePoint::infinity(), &SpherePoint::one()),
            Err(TwistorError::InvalidFiber)
        ));
    }

    #[test]
    fn factored_trajectory_worked_example() {
        // c = 1/2, x = -1/2, R = 1: b = 3/2 and y = -2.
        let c_ = SpherePoint::from_re_im(0.5, 0.0);
        let x = SpherePoint::from_re_im(-0.5, 0.0);
        let y = eval_trajectory_factored(&c_, &x, 1.0).unwrap();
        assert_affine(&y, c(-2.0, 0.0), 1e-15);
    }

    #[test]
    fn factored_trajectory_fixes_the_circle_and_sends_c_zero_to_antipode() {
        let x = SpherePoint::from_re_im(0.3, -0.6);
        let r_sq: f64 = 1.7;
        // |c| = sqrt(R) lands on x.
        let c_on = SpherePoint::from_affine(Complex64::from_polar(r_sq.sqrt(), 0.8));
        let y_on = eval_trajectory_factored(&c_on, &x, r_sq).unwrap();
        assert!(y_on.chordal_distance(&x) < 1e-13);
        // c = 0 gives b = infinity and y = -1/conj(x).
        let y_far = eval_trajectory_factored(&SpherePoint::zero(), &x, r_sq).unwrap();
        assert!(y_far.chordal_distance(&x.antipodal()) < 1e-13);
    }

    #[test]
    fn factored_agrees_with_direct_form() {
        for (d, a, t) in [
            (c(0.1, 0.2), c(0.7, 0.0), c(1.0, 0.0)),
            (c(-1.5, 0.4), c(0.2, -1.8), c(0.4, 1.1)),
        ] {
            let params = LineParams::from_affine(d, a);
            let tp = SpherePoint::from_affine(t);
            let p = eval_line(&params, &tp).unwrap();
            let direct = eval_trajectory(&params.d(), &tp, &p.x).unwrap();
            let cc = recenter(&params.d(), &p.x).unwrap();
            let factored = eval_trajectory_factored(&cc, &p.x, t.norm_sqr()).unwrap();
            assert!(direct.chordal_distance(&factored) < 1e-12);
        }
    }

    #[test]
    fn recenter_roundtrips() {
        let d = SpherePoint::from_re_im(1.4, -2.2);
        let x = SpherePoint::from_re_im(0.3, 0.5);
        let c_ = recenter(&d, &x).unwrap();
        let back = uncenter(&c_, &x).unwrap();
        assert!(back.chordal_distance(&d) < 1e-14);
        // recenter is defined at d = infinity: c = 1/conj(x).
        let c_inf = recenter(&SpherePoint::infinity(), &x).unwrap();
        let expected = 1.0 / x.to_affine().unwrap().conj();
        assert_affine(&c_inf, expected, 1e-14);
    }

    #[test]
    fn curve_csv_emits_affine_rows_with_inf_literals() {
        let params = LineParams::from_affine(c(0.0, 0.0), c(0.5, 0.0));
        let ts = [SpherePoint::zero(), SpherePoint::one(), SpherePoint::infinity()];
        let csv = curve_csv(&params, &ts).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t_re,t_im,x_re,x_im,y_re,y_im");
        assert_eq!(lines[1], "0,0,0,0,0,0");
        assert_eq!(lines[2], "1,0,-0.5,0,-2,0");
        // t = infinity passes through the antipodal diagonal point (inf, inf).
        assert_eq!(lines[3], "inf,inf,inf,inf,inf,inf");
    }

    #[test]
    fn limit_structures_differ_between_directions() {
        let d = SpherePoint::zero();
        let lz = limit_curve(&d, LimitDirection::TowardZero);
        let li = limit_curve(&d, LimitDirection::TowardInfinity);
        assert_eq!(lz.degree_pattern(), [[1, 0, 0], [0, 1, 0]]);
        assert_eq!(li.degree_pattern(), [[0, 1, 0], [1, 0, 0]]);
        assert!(lz.vertical.d().is_zero());
        assert!(li.vertical.d().is_infinity());
        assert_ne!(lz.degree_pattern(), li.degree_pattern());
    }

    #[test]
    fn classification_is_total_and_matches_the_strata() {
        let d = SpherePoint::zero();
        let cases = [
            (SpherePoint::from_re_im(0.5, 0.0), FamilyClass::A1),
            (SpherePoint::from_re_im(0.0, 2.0), FamilyClass::A2),
            (SpherePoint::from_re_im(-1.0, 0.0), FamilyClass::K),
            (SpherePoint::zero(), FamilyClass::C1),
            (SpherePoint::infinity(), FamilyClass::C2),
        ];
        for (a, expected) in cases {
            let p = LineParams::new(d, a);
            assert_eq!(p.classify(), expected);
        }
        assert_eq!(
            LineParams::new(d, SpherePoint::from_re_im(0.5, 0.0)).family(),
            Some(Family::Mplus)
        );
        assert_eq!(
            LineParams::new(d, SpherePoint::infinity()).family(),
            Some(Family::Mminus)
        );
        assert_eq!(LineParams::new(d, SpherePoint::one()).family(), None);
    }
}
