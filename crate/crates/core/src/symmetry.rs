//! The real structure, the gluing involution between the two families, and
//! the PSU(2) x U(1) symmetry action on points and on curve parameters.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curve::{LineParams, SpacePoint};
use crate::error::{Result, TwistorError};
use crate::sphere::{FractionalMap, SpherePoint};

/// The anti-holomorphic involution `(x, y, t) -> (antipodal(y), antipodal(x), antipodal(t))`
/// built from the antipodal map on each factor; in affine coordinates
/// `(-1/conj(y), -1/conj(x), -1/conj(t))`. Involutive and fixed-point free.
/// Every curve of the family is invariant: the point at `t` maps to the
/// point at `-1/conj(t)` of the same curve.
pub fn real_structure(p: &SpacePoint) -> SpacePoint {
    SpacePoint::new(p.y.antipodal(), p.x.antipodal(), p.t.antipodal())
}

/// The involution `(d, a) -> (d, 1/conj(a))` induced by swapping the first
/// two factors of the product. Fixes the K stratum pointwise, exchanges the
/// two families, and swaps the limits C1 and C2.
pub fn swap_involution(params: &LineParams) -> LineParams {
    LineParams::new(params.d(), params.a().reciprocal_conjugate())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct ComplexRepr {
    re: f64,
    im: f64,
}

/// An element of PSU(2) x U(1): the unitary matrix `((alpha, beta),
/// (-conj(beta), conj(alpha)))` acting on the first two factors plus a unit
/// scalar `g3` acting on the affine `t`-coordinate. Representatives are
/// renormalized on construction; the sign ambiguity of PSU(2) is resolved by
/// comparing actions, never representatives.
#[derive(Clone, Copy, Debug)]
pub struct GroupElement {
    alpha: Complex64,
    beta: Complex64,
    g3: Complex64,
}

impl GroupElement {
    pub fn new(alpha: Complex64, beta: Complex64, g3: Complex64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || !g3.is_finite() {
            return Err(TwistorError::InvalidGroupElement);
        }
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let m = g3.norm();
        if n == 0.0 || m == 0.0 {
            return Err(TwistorError::InvalidGroupElement);
        }
        Ok(GroupElement {
            alpha: alpha / n,
            beta: beta / n,
            g3: g3 / m,
        })
    }

    pub fn identity() -> Self {
        GroupElement {
            alpha: Complex64::ONE,
            beta: Complex64::ZERO,
            g3: Complex64::ONE,
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    /// The rotation of P^1 given by the SU(2) matrix.
    pub fn rotation_map(&self) -> FractionalMap {
        FractionalMap::new(
            self.alpha,
            self.beta,
            -self.beta.conj(),
            self.alpha.conj(),
            false,
        )
        .expect("unit-determinant rotation")
    }

    /// Group product `self * other` (apply `other` first when acting).
    pub fn compose(&self, other: &Self) -> Self {
        let alpha = self.alpha * other.alpha - self.beta * other.beta.conj();
        let beta = self.alpha * other.beta + self.beta * other.alpha.conj();
        GroupElement::new(alpha, beta, self.g3 * other.g3)
            .expect("product of unit elements is a unit element")
    }

    pub fn inverse(&self) -> Self {
        GroupElement {
            alpha: self.alpha.conj(),
            beta: -self.beta,
            g3: self.g3.conj(),
        }
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            alpha: ComplexRepr,
            beta: ComplexRepr,
            g3: ComplexRepr,
        }
        Repr {
            alpha: ComplexRepr {
                re: self.alpha.re,
                im: self.alpha.im,
            },
            beta: ComplexRepr {
                re: self.beta.re,
                im: self.beta.im,
            },
            g3: ComplexRepr {
                re: self.g3.re,
                im: self.g3.im,
            },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            alpha: ComplexRepr,
            beta: ComplexRepr,
            g3: ComplexRepr,
        }
        let r = Repr::deserialize(deserializer)?;
        GroupElement::new(
            Complex64::new(r.alpha.re, r.alpha.im),
            Complex64::new(r.beta.re, r.beta.im),
            Complex64::new(r.g3.re, r.g3.im),
        )
        .map_err(D::Error::custom)
    }
}

/// Action on the product: `(x, y, t) -> (g1 x, g1 y, g3 t)`.
pub fn act_on_space(g: &GroupElement, p: &SpacePoint) -> SpacePoint {
    let rot = g.rotation_map();
    let scale = FractionalMap::new(
        g.g3(),
        Complex64::ZERO,
        Complex64::ZERO,
        Complex64::ONE,
        false,
    )
    .expect("unit scaling");
    SpacePoint::new(rot.apply(&p.x), rot.apply(&p.y), scale.apply(&p.t))
}

/// Induced action on curve parameters: `d' = g1(d)` and `a' = mu * a` with
/// the unit-modulus multiplier
///
/// ```text
///   mu = (alpha - beta conj(d)) / ((conj(alpha) - conj(beta) d) * g3).
/// ```
///
/// The division by `g3` is forced by equivariance with the `t -> g3 t`
/// action on the product. Since `|mu| = 1`, the modulus of `a` and hence the
/// stratum (A1 / K / A2 / C1 / C2) is preserved. At `d = infinity` and at
/// `g1(d) = infinity` the multiplier is the chart limit consistent with the
/// `x = 1/(a t)` form of the curve.
pub fn act_on_params(g: &GroupElement, params: &LineParams) -> LineParams {
    let d = params.d();
    let a = params.a();
    let (d0, d1) = (d.z0(), d.z1());
    let (alpha, beta, g3) = (g.alpha(), g.beta(), g.g3());

    let d_new = g.rotation_map().apply(&d);

    // Unit-modulus multiplier, written as num / (conj(num) g3) so the
    // modulus is exact up to a single rounding.
    let mu = if d1 != Complex64::ZERO {
        let num = d1 * (alpha * d1.conj() - beta * d0.conj());
        if num == Complex64::ZERO {
            // g1(d) = infinity; beta cannot vanish here.
            beta.conj() / (beta * g3)
        } else {
            num / (num.conj() * g3)
        }
    } else if beta != Complex64::ZERO {
        beta / (beta.conj() * g3)
    } else {
        alpha.conj() / (alpha * g3)
    };

    let a_new = SpherePoint::new(mu * a.z0(), a.z1())
        .expect("unit multiplier preserves validity");
    LineParams::new(d_new, a_new)
}

/// A group element carrying one K-stratum parameter to another.
///
/// The rotation is the unitary basis change taking the spinor of `src.d`
/// to the spinor of `dst.d` (and antipode to antipode); the scalar `g3`
/// then closes the residual phase on `a`. Any valid choice passes the
/// action oracle; this one is always defined, including antipodal pairs.
pub fn transport_on_k(src: &LineParams, dst: &LineParams) -> Result<GroupElement> {
    use crate::curve::FamilyClass;
    if src.classify() != FamilyClass::K || dst.classify() != FamilyClass::K {
        return Err(TwistorError::NotOnK);
    }

    let spinor = |p: &SpherePoint| {
        let n = p.rep_norm_sqr().sqrt();
        (p.z0() / n, p.z1() / n)
    };
    let (p0, p1) = spinor(&src.d());
    let (q0, q1) = spinor(&dst.d());
    // Columns (psi, psi_perp) form a special unitary basis; the product
    // B(dst) B(src)^dagger maps spinor to spinor.
    let alpha = q0 * p0.conj() + p1 * q1.conj();
    let beta = q0 * p1.conj() - p0 * q1.conj();
    let rotation = GroupElement::new(alpha, beta, Complex64::ONE)?;

    let moved = act_on_params(&rotation, src);
    let a_moved = moved.a().to_affine().ok_or(TwistorError::NotOnK)?;
    let a_dst = dst.a().to_affine().ok_or(TwistorError::NotOnK)?;
    if a_dst.norm() == 0.0 {
        return Err(TwistorError::NotOnK);
    }
    // act_on_params divides a by g3, so g3 = a_moved / a_dst closes the gap.
    let g3 = a_moved / a_dst;
    GroupElement::new(rotation.alpha(), rotation.beta(), g3)
}
