//! Arithmetic on the Riemann sphere P^1 in homogeneous coordinates, and the
//! algebra of holomorphic / anti-holomorphic fractional (Möbius) maps.
//!
//! Every projective value in the crate (the coordinates x, y, t as well as
//! the curve parameters d and a) is a [`SpherePoint`]. Working homogeneously
//! removes all special-casing of the point at infinity: formulas that divide
//! by conjugates or take limits at infinity become finite 2x2 matrix algebra.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, TwistorError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct ComplexRepr {
    re: f64,
    im: f64,
}

/// Complex division that survives tiny denominators: the textbook formula
/// underflows in `|den|^2` long before the quotient leaves the double
/// range, so divide through by `|den|` first and multiply by the unit
/// conjugate. Overflows honestly to infinity for quotients beyond range.
pub(crate) fn stable_div(num: Complex64, den: Complex64) -> Complex64 {
    let s = den.norm();
    (num / s) * (den / s).conj()
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        ComplexRepr { re: z.re, im: z.im }
    }
}

impl From<ComplexRepr> for Complex64 {
    fn from(r: ComplexRepr) -> Self {
        Complex64::new(r.re, r.im)
    }
}

/// A point of the complex projective line in homogeneous coordinates
/// `(z0 : z1)`, with affine value `z0 / z1` and infinity at `(1 : 0)`.
///
/// The stored representative is canonical up to phase: the larger-modulus
/// component has modulus 1. Equality is always projective; the type
/// deliberately does not implement `PartialEq` on raw components.
#[derive(Clone, Copy, Debug)]
pub struct SpherePoint {
    z0: Complex64,
    z1: Complex64,
}

impl SpherePoint {
    /// Builds a point from a homogeneous pair, normalizing so that
    /// `max(|z0|, |z1|) = 1`. Rejects non-finite components and `(0, 0)`.
    pub fn new(z0: Complex64, z1: Complex64) -> Result<Self> {
        if !z0.is_finite() || !z1.is_finite() {
            return Err(TwistorError::InvalidPoint);
        }
        let m = z0.norm().max(z1.norm());
        if m == 0.0 {
            return Err(TwistorError::InvalidPoint);
        }
        Ok(SpherePoint {
            z0: z0 / m,
            z1: z1 / m,
        })
    }

    /// Point with affine coordinate `z`; non-finite input maps to infinity.
    pub fn from_affine(z: Complex64) -> Self {
        if z.is_finite() {
            Self::new(z, Complex64::ONE).expect("finite affine value")
        } else {
            Self::infinity()
        }
    }

    pub fn from_re_im(re: f64, im: f64) -> Self {
        Self::from_affine(Complex64::new(re, im))
    }

    pub fn zero() -> Self {
        SpherePoint {
            z0: Complex64::ZERO,
            z1: Complex64::ONE,
        }
    }

    pub fn one() -> Self {
        SpherePoint {
            z0: Complex64::ONE,
            z1: Complex64::ONE,
        }
    }

    pub fn infinity() -> Self {
        SpherePoint {
            z0: Complex64::ONE,
            z1: Complex64::ZERO,
        }
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    pub fn is_infinity(&self) -> bool {
        self.z1 == Complex64::ZERO
    }

    pub fn is_zero(&self) -> bool {
        self.z0 == Complex64::ZERO
    }

    /// Affine coordinate `z0 / z1`; `None` at infinity or when the value
    /// exceeds the double range.
    pub fn to_affine(&self) -> Option<Complex64> {
        if self.is_infinity() {
            return None;
        }
        let z = stable_div(self.z0, self.z1);
        z.is_finite().then_some(z)
    }

    /// Squared Euclidean norm `|z0|^2 + |z1|^2` of the canonical
    /// representative; lies in `[1, 2]`.
    pub fn rep_norm_sqr(&self) -> f64 {
        self.z0.norm_sqr() + self.z1.norm_sqr()
    }

    /// The antipodal map `(z0 : z1) -> (-conj(z1) : conj(z0))`, the
    /// fixed-point-free real structure of P^1. Involutive; every point is at
    /// chordal distance 1 from its image.
    pub fn antipodal(&self) -> Self {
        SpherePoint {
            z0: -self.z1.conj(),
            z1: self.z0.conj(),
        }
    }

    /// Reflection through the unit circle, `z -> 1/conj(z)`: in homogeneous
    /// form `(z0 : z1) -> (conj(z1) : conj(z0))`. Exactly involutive; fixes
    /// `|z| = 1` pointwise and exchanges 0 with infinity.
    pub fn reciprocal_conjugate(&self) -> Self {
        SpherePoint {
            z0: self.z1.conj(),
            z1: self.z0.conj(),
        }
    }

    /// Chordal distance `|z0 w1 - z1 w0| / (||z|| ||w||)`, in `[0, 1]`.
    /// Zero exactly on projectively equal points, 1 on antipodal pairs.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        let cross = self.z0 * other.z1 - self.z1 * other.z0;
        let denom = self.rep_norm_sqr().sqrt() * other.rep_norm_sqr().sqrt();
        (cross.norm() / denom).min(1.0)
    }

    /// Projective closeness in the chordal metric.
    pub fn projectively_close(&self, other: &Self, tol: f64) -> bool {
        self.chordal_distance(other) <= tol
    }

    /// Exact projective equality: the homogeneous cross product is zero to
    /// the last bit. Holds for algebraic involutions (antipodal twice, swap
    /// twice) but not for generic roundtrips.
    pub fn exactly_projectively_equal(&self, other: &Self) -> bool {
        self.z0 * other.z1 - self.z1 * other.z0 == Complex64::ZERO
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [ComplexRepr::from(self.z0), ComplexRepr::from(self.z1)].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[ComplexRepr; 2]>::deserialize(deserializer)?;
        SpherePoint::new(a.into(), b.into()).map_err(D::Error::custom)
    }
}

/// A fractional transformation of P^1: the matrix `((p, q), (r, s))` acting
/// on homogeneous pairs, optionally conjugating its input first.
///
/// Anti-holomorphic maps are first-class because the real structure, the
/// antipodal map and the trajectory curves are all anti-holomorphic; keeping
/// the conjugation as a flag makes their composition algebra explicit
/// (anti after anti is holomorphic, mixed compositions are anti).
#[derive(Clone, Copy, Debug)]
pub struct FractionalMap {
    p: Complex64,
    q: Complex64,
    r: Complex64,
    s: Complex64,
    conjugates_input: bool,
}

impl FractionalMap {
    /// Degeneracy floor for `|det|`, relative to the squared maximum
    /// coefficient modulus (the determinant is quadratic in the coefficients).
    pub const DET_FLOOR: f64 = 1e-12;

    /// Validates and stores the map with coefficients scaled to maximum
    /// modulus 1. Maps with `|ps - qr|` below the floor are rejected rather
    /// than allowed to produce garbage.
    pub fn new(
        p: Complex64,
        q: Complex64,
        r: Complex64,
        s: Complex64,
        conjugates_input: bool,
    ) -> Result<Self> {
        for z in [p, q, r, s] {
            if !z.is_finite() {
                return Err(TwistorError::InvalidPoint);
            }
        }
        let m = p.norm().max(q.norm()).max(r.norm()).max(s.norm());
        if m == 0.0 {
            return Err(TwistorError::DegenerateMap {
                det: 0.0,
                floor: Self::DET_FLOOR,
            });
        }
        let (p, q, r, s) = (p / m, q / m, r / m, s / m);
        let det = (p * s - q * r).norm();
        if det < Self::DET_FLOOR {
            return Err(TwistorError::DegenerateMap {
                det,
                floor: Self::DET_FLOOR,
            });
        }
        Ok(FractionalMap {
            p,
            q,
            r,
            s,
            conjugates_input,
        })
    }

    pub fn identity() -> Self {
        FractionalMap {
            p: Complex64::ONE,
            q: Complex64::ZERO,
            r: Complex64::ZERO,
            s: Complex64::ONE,
            conjugates_input: false,
        }
    }

    /// The antipodal map as a fractional transformation:
    /// `(z0 : z1) -> (-conj(z1) : conj(z0))`.
    pub fn antipodal_map() -> Self {
        FractionalMap {
            p: Complex64::ZERO,
            q: -Complex64::ONE,
            r: Complex64::ONE,
            s: Complex64::ZERO,
            conjugates_input: true,
        }
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.p, self.q, self.r, self.s]
    }

    pub fn conjugates_input(&self) -> bool {
        self.conjugates_input
    }

    pub fn determinant(&self) -> Complex64 {
        self.p * self.s - self.q * self.r
    }

    /// Applies the map. The image of a projective class does not depend on
    /// the chosen representative.
    pub fn apply(&self, pt: &SpherePoint) -> SpherePoint {
        let (w0, w1) = if self.conjugates_input {
            (pt.z0.conj(), pt.z1.conj())
        } else {
            (pt.z0, pt.z1)
        };
        SpherePoint::new(self.p * w0 + self.q * w1, self.r * w0 + self.s * w1)
            .expect("a nondegenerate map cannot annihilate a point")
    }

    /// Composition `self . inner` (apply `inner` first). The conjugation
    /// flags combine by xor.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let [a, b, c, d] = if self.conjugates_input {
            [
                inner.p.conj(),
                inner.q.conj(),
                inner.r.conj(),
                inner.s.conj(),
            ]
        } else {
            inner.coefficients()
        };
        FractionalMap::new(
            self.p * a + self.q * c,
            self.p * b + self.q * d,
            self.r * a + self.s * c,
            self.r * b + self.s * d,
            self.conjugates_input ^ inner.conjugates_input,
        )
    }

    /// The inverse transformation (adjugate matrix, conjugated for
    /// anti-holomorphic maps).
    pub fn inverse(&self) -> Self {
        let (p, q, r, s) = (self.s, -self.q, -self.r, self.p);
        let (p, q, r, s) = if self.conjugates_input {
            (p.conj(), q.conj(), r.conj(), s.conj())
        } else {
            (p, q, r, s)
        };
        FractionalMap::new(p, q, r, s, self.conjugates_input)
            .expect("the adjugate of a valid map is valid")
    }
}

/// Tolerance for chordal-metric equality decisions.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ChordalTolerance {
    epsilon: f64,
}

impl ChordalTolerance {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(TwistorError::InvalidTolerance(epsilon));
        }
        Ok(ChordalTolerance { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for ChordalTolerance {
    fn default() -> Self {
        ChordalTolerance { epsilon: 1e-9 }
    }
}
