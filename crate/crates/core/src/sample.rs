//! Seeded, deterministic sampling of sphere points, curve parameters and
//! group elements for the verification suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::LineParams;
use crate::sphere::SpherePoint;
use crate::symmetry::GroupElement;

/// Deterministic sampler; identical seeds give identical streams.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn log_range(&mut self, lo: f64, hi: f64) -> f64 {
        (self.range(lo.ln(), hi.ln())).exp()
    }

    pub fn angle(&mut self) -> f64 {
        self.range(0.0, std::f64::consts::TAU)
    }

    pub fn unit_complex(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle())
    }

    fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1: f64 = self.uniform().max(f64::MIN_POSITIVE);
        let u2 = self.angle();
        let r = (-2.0 * u1.ln()).sqrt();
        (r * u2.cos(), r * u2.sin())
    }

    /// Uniform point of P^1 in the chordal (Fubini-Study) measure, via a
    /// uniform point of the 2-sphere mapped by stereographic projection;
    /// the homogeneous form `(X + iY : 1 - Z)` handles the pole exactly.
    pub fn sphere_point(&mut self) -> SpherePoint {
        loop {
            let (x1, x2) = (self.range(-1.0, 1.0), self.range(-1.0, 1.0));
            let s = x1 * x1 + x2 * x2;
            if s >= 1.0 {
                continue;
            }
            let f = 2.0 * (1.0 - s).sqrt();
            let (x, y, z) = (x1 * f, x2 * f, 1.0 - 2.0 * s);
            if z == 1.0 {
                return SpherePoint::infinity();
            }
            return SpherePoint::new(Complex64::new(x, y), Complex64::new(1.0 - z, 0.0))
                .expect("nonzero stereographic pair");
        }
    }

    /// Sphere point whose affine modulus lies in `[lo, hi]`.
    pub fn bounded_point(&mut self, lo: f64, hi: f64) -> SpherePoint {
        loop {
            let p = self.sphere_point();
            match p.to_affine() {
                Some(z) if z.norm() >= lo && z.norm() <= hi => return p,
                _ => continue,
            }
        }
    }

    /// Point on the affine circle of the given radius.
    pub fn circle_point(&mut self, radius: f64) -> SpherePoint {
        SpherePoint::from_affine(Complex64::from_polar(radius, self.angle()))
    }

    /// Interior curve parameters with `|a|` in `[1e-2, 1e2]` and at least
    /// `k_exclusion` away from the unit circle.
    pub fn interior_params(&mut self, k_exclusion: f64) -> LineParams {
        let d = self.sphere_point();
        let a = loop {
            let m = self.log_range(1e-2, 1e2);
            if (m - 1.0).abs() >= k_exclusion {
                break Complex64::from_polar(m, self.angle());
            }
        };
        LineParams::new(d, SpherePoint::from_affine(a))
    }

    /// Parameters on the K stratum (`|a| = 1` to rounding).
    pub fn k_params(&mut self) -> LineParams {
        let d = self.sphere_point();
        LineParams::new(d, SpherePoint::from_affine(self.unit_complex()))
    }

    /// Haar-uniform rotation plus a uniform phase factor.
    pub fn group_element(&mut self) -> GroupElement {
        let (g0, g1) = self.gaussian_pair();
        let (g2, g3) = self.gaussian_pair();
        GroupElement::new(
            Complex64::new(g0, g1),
            Complex64::new(g2, g3),
            self.unit_complex(),
        )
        .expect("gaussian quadruple is almost surely nonzero")
    }

    /// Off-diagonal pair `(x, y)` with chordal separation above `min_sep`.
    pub fn off_diagonal_pair(&mut self, min_sep: f64) -> (SpherePoint, SpherePoint) {
        loop {
            let x = self.sphere_point();
            let y = self.sphere_point();
            if x.chordal_distance(&y) > min_sep {
                return (x, y);
            }
        }
    }
}
