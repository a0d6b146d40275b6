//! Desk-scale numerical verification: seeded falsification suites for the
//! foliation property and every structural identity of the curve families,
//! with a deterministic machine-readable report.
//!
//! Each suite draws its samples from its own seeded stream, evaluates one
//! error functional per sample, and records counterexample inputs for any
//! sample above tolerance. Failures are data, not panics; re-running a
//! recorded counterexample through [`replay`] reproduces its error exactly.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{
    eval_line, eval_trajectory, eval_trajectory_factored, limit_curve, on_q, recenter, Family,
    FamilyClass, LimitDirection, LineParams, SpacePoint,
};
use crate::error::{Result, TwistorError};
use crate::incidence::{
    fiber_zero_point, incidence_map, jacobian, solve_fiber_zero, solve_line_through,
    FiberZeroPoint,
};
use crate::sample::Sampler;
use crate::sphere::{ChordalTolerance, SpherePoint};
use crate::symmetry::{
    act_on_params, act_on_space, real_structure, swap_involution, transport_on_k, GroupElement,
};

/// Canonical suite order; every run reports all of these.
pub const SUITE_NAMES: [&str; 13] = [
    "foliation",
    "reality",
    "k_in_q",
    "trajectory",
    "trajectory_factored",
    "jacobian_fd",
    "jacobian_zero",
    "swap",
    "equivariance",
    "group_law",
    "degeneration",
    "limit_structure",
    "transport",
];

const MAX_RECORDED_FAILURES: usize = 32;
/// Statistical suites exclude a band around `|a| = 1`; K gets its own suite.
const K_EXCLUSION: f64 = 1e-4;

fn default_tolerance(suite: &str) -> f64 {
    match suite {
        "foliation" => 1e-9,
        "reality" => 1e-12,
        "k_in_q" => 1e-12,
        "trajectory" => 1e-10,
        "trajectory_factored" => 1e-10,
        "jacobian_fd" => 1e-5,
        "jacobian_zero" => 1e-8,
        "swap" => 1e-12,
        "equivariance" => 1e-10,
        "group_law" => 1e-11,
        // Shortfall of the fitted log-log convergence slope below 0.9.
        "degeneration" => 1e-9,
        "limit_structure" => 1e-9,
        "transport" => 1e-10,
        _ => 1e-9,
    }
}

/// Seeds, sample counts, fiber shells and per-suite tolerance overrides.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationPlan {
    pub seed: u64,
    pub samples_per_suite: usize,
    pub t_shells: Vec<f64>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerificationPlan {
    fn default() -> Self {
        VerificationPlan {
            seed: 42,
            samples_per_suite: 2000,
            t_shells: vec![0.5, 1.0, 2.0],
            tolerances: BTreeMap::new(),
        }
    }
}

impl VerificationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_suite < 100 {
            return Err(TwistorError::InvalidPlan(
                "statistical suites need at least 100 samples".into(),
            ));
        }
        if self.t_shells.is_empty() || self.t_shells.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(TwistorError::InvalidPlan(
                "t shells must be positive finite radii".into(),
            ));
        }
        for (name, tol) in &self.tolerances {
            if !tol.is_finite() || *tol <= 0.0 {
                return Err(TwistorError::InvalidPlan(format!(
                    "tolerance for {name} must be positive"
                )));
            }
            if !SUITE_NAMES.contains(&name.as_str()) {
                return Err(TwistorError::InvalidPlan(format!("unknown suite {name}")));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, suite: &str) -> f64 {
        self.tolerances
            .get(suite)
            .copied()
            .unwrap_or_else(|| default_tolerance(suite))
    }

    fn suite_seed(&self, suite: &str) -> u64 {
        let idx = SUITE_NAMES.iter().position(|s| *s == suite).unwrap_or(99) as u64;
        self.seed ^ (idx + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Inputs of a failed sample, stored exactly so the run can be reproduced.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CounterexampleInput {
    Solve {
        x: SpherePoint,
        y: SpherePoint,
        t: SpherePoint,
        family: Family,
    },
    FiberSolve {
        d: SpherePoint,
        v: SpherePoint,
        family: Family,
    },
    ParamsAtT {
        d: SpherePoint,
        a: SpherePoint,
        t: SpherePoint,
    },
    Action {
        g: GroupElement,
        d: SpherePoint,
        a: SpherePoint,
        t: SpherePoint,
    },
    GroupPair {
        g: GroupElement,
        h: GroupElement,
        d: SpherePoint,
        a: SpherePoint,
        t: SpherePoint,
    },
    Transport {
        src_d: SpherePoint,
        src_a: SpherePoint,
        dst_d: SpherePoint,
        dst_a: SpherePoint,
    },
    DisjointPair {
        d1: SpherePoint,
        a1: SpherePoint,
        d2: SpherePoint,
        a2: SpherePoint,
        t: SpherePoint,
    },
    Degeneration {
        d: SpherePoint,
        phase: f64,
    },
    LimitPair {
        d1: SpherePoint,
        d2: SpherePoint,
    },
    DiagonalInjection {
        q: SpherePoint,
        t: SpherePoint,
    },
    BoundaryC2 {
        x: SpherePoint,
        t: SpherePoint,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    pub suite: String,
    pub input: CounterexampleInput,
    pub observed_error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub status: Status,
    pub failures: Vec<Counterexample>,
    pub expected_rejections: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub plan: VerificationPlan,
    pub suites: Vec<SuiteReport>,
    pub status: Status,
}

impl VerificationReport {
    /// JSON with lexicographically sorted keys, stable across runs.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&value).expect("report prints")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<20} {:>8} {:>13} {:>10} {:>9} {:>6}\n",
            "suite", "samples", "max_error", "tolerance", "failures", "status"
        ));
        for s in &self.suites {
            out.push_str(&format!(
                "{:<20} {:>8} {:>13.3e} {:>10.1e} {:>9} {:>6}\n",
                s.name,
                s.samples,
                s.max_error,
                s.tolerance,
                s.failures.len(),
                match s.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                }
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            match self.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
            }
        ));
        out
    }
}

/// Accumulates per-sample errors into a suite report.
struct SuiteAccumulator {
    name: &'static str,
    samples: usize,
    max_error: f64,
    tolerance: f64,
    failures: Vec<Counterexample>,
    expected_rejections: usize,
    notes: Vec<String>,
    truncated: bool,
}

impl SuiteAccumulator {
    fn new(name: &'static str, tolerance: f64) -> Self {
        SuiteAccumulator {
            name,
            samples: 0,
            max_error: 0.0,
            tolerance,
            failures: Vec::new(),
            expected_rejections: 0,
            notes: Vec::new(),
            truncated: false,
        }
    }

    fn record(&mut self, error: f64, input: impl FnOnce() -> CounterexampleInput) {
        self.samples += 1;
        if error > self.max_error {
            self.max_error = error;
        }
        if error > self.tolerance {
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(Counterexample {
                    suite: self.name.to_string(),
                    input: input(),
                    observed_error: error,
                });
            } else {
                self.truncated = true;
            }
        }
    }

    fn finish(mut self) -> SuiteReport {
        if self.truncated {
            self.notes.push(format!(
                "failure list truncated to {MAX_RECORDED_FAILURES} entries"
            ));
        }
        let status = if self.failures.is_empty() && self.max_error <= self.tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        SuiteReport {
            name: self.name.to_string(),
            samples: self.samples,
            max_error: self.max_error,
            tolerance: self.tolerance,
            status,
            failures: self.failures,
            expected_rejections: self.expected_rejections,
            notes: self.notes,
        }
    }
}

// ---------------------------------------------------------------------------
// Per-sample error functionals, shared between the suites and `replay`.
// ---------------------------------------------------------------------------

fn params_error(p: &LineParams, q: &LineParams) -> f64 {
    p.d()
        .chordal_distance(&q.d())
        .max(p.a().chordal_distance(&q.a()))
}

fn space_error(p: &SpacePoint, q: &SpacePoint) -> f64 {
    p.x.chordal_distance(&q.x)
        .max(p.y.chordal_distance(&q.y))
        .max(p.t.chordal_distance(&q.t))
}

/// Roundtrip error of solving for the given family through `(x, y, t)`.
fn solve_error(x: &SpherePoint, y: &SpherePoint, t: &SpherePoint, family: Family) -> f64 {
    let p = SpacePoint::new(*x, *y, *t);
    let solver_tol = ChordalTolerance::default();
    match solve_line_through(&p, family, &solver_tol) {
        Ok((params, _)) => incidence_map(&params, t)
            .map(|q| x.chordal_distance(&q.x).max(y.chordal_distance(&q.y)))
            .unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// Whether the two family solutions straddle `|a| = 1`.
fn double_cover_ok(x: &SpherePoint, y: &SpherePoint, t: &SpherePoint) -> bool {
    let p = SpacePoint::new(*x, *y, *t);
    let solver_tol = ChordalTolerance::default();
    let plus = solve_line_through(&p, Family::Mplus, &solver_tol);
    let minus = solve_line_through(&p, Family::Mminus, &solver_tol);
    match (plus, minus) {
        (Ok((p1, _)), Ok((p2, _))) => p1.a_modulus() < 1.0 && p2.a_modulus() > 1.0,
        _ => false,
    }
}

/// Combined generic-fiber error: both families solve with a small roundtrip
/// and the solutions straddle the unit circle.
fn foliation_generic_error(x: &SpherePoint, y: &SpherePoint, t: &SpherePoint) -> f64 {
    let err = solve_error(x, y, t, Family::Mplus).max(solve_error(x, y, t, Family::Mminus));
    if double_cover_ok(x, y, t) {
        err
    } else {
        f64::INFINITY
    }
}

/// 1 unless the diagonal point is rejected with the on-diagonal error.
fn diagonal_injection_error(q: &SpherePoint, t: &SpherePoint) -> f64 {
    let p = SpacePoint::new(*q, *q, *t);
    match solve_line_through(&p, Family::Mplus, &ChordalTolerance::default()) {
        Err(TwistorError::OnDiagonal { .. }) => 0.0,
        _ => 1.0,
    }
}

/// 1 unless the boundary point `y = antipodal(x)` is covered by a reducible
/// (C2) member of the minus family.
fn boundary_c2_error(x: &SpherePoint, t: &SpherePoint) -> f64 {
    let p = SpacePoint::new(*x, x.antipodal(), *t);
    match solve_line_through(&p, Family::Mminus, &ChordalTolerance::default()) {
        Ok((params, _)) if params.classify() == FamilyClass::C2 => 0.0,
        _ => 1.0,
    }
}

fn fiber_solve_error(d: &SpherePoint, v: &SpherePoint, family: Family) -> f64 {
    let fp = FiberZeroPoint { d: *d, v: *v };
    match solve_fiber_zero(&fp, family) {
        Ok(params) => {
            if params.a().is_zero() || params.a().is_infinity() {
                // Reducible limit: v = 0 roundtrips structurally.
                if v.is_zero() {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                fiber_zero_point(&params)
                    .map(|back| back.v.chordal_distance(v))
                    .unwrap_or(f64::INFINITY)
            }
        }
        Err(_) => f64::INFINITY,
    }
}

fn reality_error(d: &SpherePoint, a: &SpherePoint, t: &SpherePoint) -> f64 {
    let params = LineParams::new(*d, *a);
    let lhs = match eval_line(&params, t) {
        Ok(p) => real_structure(&p),
        Err(_) => return f64::INFINITY,
    };
    let rhs = match eval_line(&params, &t.antipodal()) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    let mut err = space_error(&lhs, &rhs);
    // sigma is an exact projective involution, and each factor sits at
    // chordal distance exactly 1 from its antipode.
    let p = eval_line(&params, t).unwrap();
    let back = real_structure(&real_structure(&p));
    if !back.x.exactly_projectively_equal(&p.x)
        || !back.y.exactly_projectively_equal(&p.y)
        || !back.t.exactly_projectively_equal(&p.t)
    {
        err = f64::INFINITY;
    }
    for factor in [&p.x, &p.y, &p.t] {
        err = err.max((factor.chordal_distance(&factor.antipodal()) - 1.0).abs());
    }
    err
}

fn k_in_q_error(d: &SpherePoint, a: &SpherePoint, t: &SpherePoint) -> f64 {
    match eval_line(&LineParams::new(*d, *a), t) {
        Ok(p) => p.x.chordal_distance(&p.y),
        Err(_) => f64::INFINITY,
    }
}

fn trajectory_error(d: &SpherePoint, a: &SpherePoint, t: &SpherePoint) -> f64 {
    let p = match eval_line(&LineParams::new(*d, *a), t) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    match eval_trajectory(d, t, &p.x) {
        Ok(y) => y.chordal_distance(&p.y),
        Err(_) => f64::INFINITY,
    }
}

fn trajectory_factored_error(d: &SpherePoint, a: &SpherePoint, t: &SpherePoint) -> f64 {
    let p = match eval_line(&LineParams::new(*d, *a), t) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    if p.x.is_infinity() {
        return 0.0;
    }
    let direct = match eval_trajectory(d, t, &p.x) {
        Ok(y) => y,
        Err(_) => return f64::INFINITY,
    };
    let r_sq = (t.z0().norm() / t.z1().norm()).powi(2);
    let c = match recenter(d, &p.x) {
        Ok(c) => c,
        Err(_) => return f64::INFINITY,
    };
    match eval_trajectory_factored(&c, &p.x, r_sq) {
        Ok(y) => y.chordal_distance(&direct),
        Err(_) => f64::INFINITY,
    }
}

/// 4x4 determinant by Gaussian elimination with partial pivoting.
fn det4(mut m: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let pivot_row = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (x, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *x -= f * p;
            }
        }
    }
    det
}

/// Central-difference determinant of the real derivative of the incidence
/// map in coordinates `(Re d, Im d, Re a, Im a) -> (Re x, Im x, Re y, Im y)`.
/// Returns `None` when an evaluation leaves the affine chart.
pub fn finite_difference_jacobian(
    d: Complex64,
    a: Complex64,
    t: &SpherePoint,
    step: f64,
) -> Option<f64> {
    let f = |v: [f64; 4]| -> Option<[f64; 4]> {
        let params = LineParams::from_affine(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]));
        let p = eval_line(&params, t).ok()?;
        let x = p.x.to_affine()?;
        let y = p.y.to_affine()?;
        Some([x.re, x.im, y.re, y.im])
    };
    let v0 = [d.re, d.im, a.re, a.im];
    let mut jac = [[0.0; 4]; 4];
    for col in 0..4 {
        let mut vp = v0;
        let mut vm = v0;
        vp[col] += step;
        vm[col] -= step;
        let fp = f(vp)?;
        let fm = f(vm)?;
        for row in 0..4 {
            jac[row][col] = (fp[row] - fm[row]) / (2.0 * step);
        }
    }
    Some(det4(jac))
}

fn jacobian_fd_error(d: &SpherePoint, a: &SpherePoint, t: &SpherePoint) -> f64 {
    let params = LineParams::new(*d, *a);
    let closed = match jacobian(&params, t) {
        Ok(j) => j,
        Err(_) => return f64::INFINITY,
    };
    let (da, aa) = match (d.to_affine(), a.to_affine()) {
        (Some(da), Some(aa)) => (da, aa),
        _ => return f64::INFINITY,
    };
    let fd = match finite_difference_jacobian(da, aa, t, 1e-5) {
        Some(v) if v != 0.0 => v,
        _ => return f64::INFINITY,
    };
    let rel = (closed.real_det.abs() - fd.abs()).abs() / fd.abs();
    // The closed form and the numeric derivative must also agree in sign,
    // and the conformal density must rescale to the determinant exactly.
    let r_sq = t.to_affine().map(|z| z.norm_sqr()).unwrap_or(f64::NAN);
    let conformal = (1.0 + da.norm_sqr()) * (1.0 + r_sq);
    let density_rel =
        (closed.density * conformal - closed.real_det).abs() / closed.real_det.abs();
    if closed.real_det.signum() != fd.signum() {
        return f64::INFINITY;
    }
    rel.max(density_rel)
}

/// `|J| / scale` on the K stratum; the zero set must be resolved from the
/// surrounding interior by the `jacobian_zero` tolerance.
fn jacobian_zero_ratio(d: &SpherePoint, a: &SpherePoint, t: &SpherePoint) -> f64 {
    match jacobian(&LineParams::new(*d, *a), t) {
        Ok(j) => j.real_det.abs() / j.scale,
        Err(_) => f64::INFINITY,
    }
}

fn swap_error(d: &SpherePoint, a: &SpherePoint, t: &SpherePoint) -> f64 {
    let params = LineParams::new(*d, *a);
    let swapped = swap_involution(&params);
    let p = match incidence_map(&params, t) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    let q = match incidence_map(&swapped, t) {
        Ok(q) => q,
        Err(_) => return f64::INFINITY,
    };
    let mut err = p.x.chordal_distance(&q.y).max(p.y.chordal_distance(&q.x));
    let back = swap_involution(&swapped);
    if !back.a().exactly_projectively_equal(&params.a()) {
        err = f64::INFINITY;
    }
    err
}

fn equivariance_error(g: &GroupElement, d: &SpherePoint, a: &SpherePoint, t: &SpherePoint) -> f64 {
    let params = LineParams::new(*d, *a);
    let moved = act_on_params(g, &params);
    let t_affine = match t.to_affine() {
        Some(z) => z,
        None => return f64::INFINITY,
    };
    let t_moved = SpherePoint::from_affine(g.g3() * t_affine);
    let lhs = match eval_line(&moved, &t_moved) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    let rhs = match eval_line(&params, t) {
        Ok(p) => act_on_space(g, &p),
        Err(_) => return f64::INFINITY,
    };
    let mut err = lhs.x.chordal_distance(&rhs.x).max(lhs.y.chordal_distance(&rhs.y));
    // The multiplier has unit modulus: |a| is preserved to rounding and the
    // stratum exactly.
    let m0 = params.a_modulus();
    let m1 = moved.a_modulus();
    if m0.is_finite() && m0 > 0.0 && (m1 - m0).abs() / m0 > 1e-12 {
        err = f64::INFINITY;
    }
    if moved.classify() != params.classify() {
        err = f64::INFINITY;
    }
    err
}

fn group_law_error(
    g: &GroupElement,
    h: &GroupElement,
    d: &SpherePoint,
    a: &SpherePoint,
    t: &SpherePoint,
) -> f64 {
    let params = LineParams::new(*d, *a);
    let composed = act_on_params(&g.compose(h), &params);
    let stepwise = act_on_params(g, &act_on_params(h, &params));
    let mut err = params_error(&composed, &stepwise);
    let p = SpacePoint::new(*d, *a, *t);
    let composed_p = act_on_space(&g.compose(h), &p);
    let stepwise_p = act_on_space(g, &act_on_space(h, &p));
    err = err.max(space_error(&composed_p, &stepwise_p));
    err
}

fn transport_error(src: &LineParams, dst: &LineParams) -> f64 {
    match transport_on_k(src, dst) {
        Ok(g) => params_error(&act_on_params(&g, src), dst),
        Err(_) => f64::INFINITY,
    }
}

/// Shortfall below the required log-log convergence slope for the
/// degeneration of the curve toward its vertical limit, sampled on the
/// unit `t`-shell.
fn degeneration_shortfall(d: &SpherePoint, phase: f64) -> f64 {
    const REQUIRED_SLOPE: f64 = 0.9;
    let moduli = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let vertical = LineParams::new(*d, SpherePoint::zero());
    let mut logs = Vec::with_capacity(moduli.len());
    for m in moduli {
        let a = SpherePoint::from_affine(Complex64::from_polar(m, phase));
        let params = LineParams::new(*d, a);
        let mut sup = 0.0f64;
        for k in 0..16 {
            let t = SpherePoint::from_affine(Complex64::from_polar(
                1.0,
                std::f64::consts::TAU * k as f64 / 16.0,
            ));
            let p = match eval_line(&params, &t) {
                Ok(p) => p,
                Err(_) => return f64::INFINITY,
            };
            let q = eval_line(&vertical, &t).unwrap();
            sup = sup
                .max(p.x.chordal_distance(&q.x))
                .max(p.y.chordal_distance(&q.y));
        }
        if sup == 0.0 {
            return f64::INFINITY;
        }
        logs.push((m.ln(), sup.ln()));
    }
    // Least-squares slope of ln(sup error) against ln |a|.
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (REQUIRED_SLOPE - slope).max(0.0)
}

fn limit_pair_error(d1: &SpherePoint, d2: &SpherePoint) -> f64 {
    let toward_zero = limit_curve(d1, LimitDirection::TowardZero);
    let toward_inf = limit_curve(d2, LimitDirection::TowardInfinity);
    if toward_zero.degree_pattern() == toward_inf.degree_pattern() {
        1.0
    } else {
        0.0
    }
}

/// Re-runs a recorded counterexample and returns the recomputed error, or
/// `None` for a suite/input combination that cannot be replayed.
pub fn replay(cx: &Counterexample) -> Option<f64> {
    use CounterexampleInput as CI;
    let err = match (&cx.suite[..], &cx.input) {
        ("foliation", CI::Solve { x, y, t, .. }) => foliation_generic_error(x, y, t),
        ("foliation", CI::FiberSolve { d, v, family }) => fiber_solve_error(d, v, *family),
        ("foliation", CI::DiagonalInjection { q, t }) => diagonal_injection_error(q, t),
        ("foliation", CI::BoundaryC2 { x, t }) => boundary_c2_error(x, t),
        ("foliation", CI::DisjointPair { d1, a1, d2, a2, t }) => {
            disjointness_error(&LineParams::new(*d1, *a1), &LineParams::new(*d2, *a2), t)
        }
        ("reality", CI::ParamsAtT { d, a, t }) => reality_error(d, a, t),
        ("k_in_q", CI::ParamsAtT { d, a, t }) => k_in_q_error(d, a, t),
        ("trajectory", CI::ParamsAtT { d, a, t }) => trajectory_error(d, a, t),
        ("trajectory_factored", CI::ParamsAtT { d, a, t }) => trajectory_factored_error(d, a, t),
        ("jacobian_fd", CI::ParamsAtT { d, a, t }) => jacobian_fd_error(d, a, t),
        ("jacobian_zero", CI::ParamsAtT { d, a, t }) => jacobian_zero_ratio(d, a, t),
        ("swap", CI::ParamsAtT { d, a, t }) => swap_error(d, a, t),
        ("equivariance", CI::Action { g, d, a, t }) => equivariance_error(g, d, a, t),
        ("group_law", CI::GroupPair { g, h, d, a, t }) => group_law_error(g, h, d, a, t),
        ("transport", CI::Transport {
            src_d,
            src_a,
            dst_d,
            dst_a,
        }) => transport_error(
            &LineParams::new(*src_d, *src_a),
            &LineParams::new(*dst_d, *dst_a),
        ),
        ("degeneration", CI::Degeneration { d, phase }) => degeneration_shortfall(d, *phase),
        ("limit_structure", CI::LimitPair { d1, d2 }) => limit_pair_error(d1, d2),
        _ => return None,
    };
    Some(err)
}

/// Fiberwise injectivity spot check: images of distinct same-family
/// parameters must stay separated unless the parameters themselves are
/// close. Returns 0 when separated, 1 when an actual collision is found.
fn disjointness_error(p1: &LineParams, p2: &LineParams, t: &SpherePoint) -> f64 {
    let q1 = match incidence_map(p1, t) {
        Ok(q) => q,
        Err(_) => return f64::INFINITY,
    };
    let q2 = match incidence_map(p2, t) {
        Ok(q) => q,
        Err(_) => return f64::INFINITY,
    };
    let image_sep = q1.x.chordal_distance(&q2.x).max(q1.y.chordal_distance(&q2.y));
    let param_sep = params_error(p1, p2);
    if image_sep <= 1e-9 && param_sep > 1e-6 {
        1.0
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Suites.
// ---------------------------------------------------------------------------

/// The foliation suite: every off-diagonal point of every sampled fiber is
/// passed by exactly one member of each family (with the two solutions on
/// opposite sides of `|a| = 1`), the blown-up `t = 0` fiber is solvable,
/// injected diagonal points are rejected, images of distinct parameters
/// stay disjoint, and the reducible members of the minus family are present
/// at the sampled boundary points.
pub fn verify_foliation(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("foliation");
    let mut acc = SuiteAccumulator::new("foliation", tol);
    let mut sampler = Sampler::new(plan.suite_seed("foliation"));

    // Generic fibers, one batch per shell, evaluated in parallel but merged
    // in sample order.
    for &shell in &plan.t_shells {
        let inputs: Vec<(SpherePoint, SpherePoint, SpherePoint)> = (0..plan.samples_per_suite)
            .map(|_| {
                let (x, y) = sampler.off_diagonal_pair(1e-6);
                (x, y, sampler.circle_point(shell))
            })
            .collect();
        let results: Vec<f64> = inputs
            .par_iter()
            .map(|(x, y, t)| foliation_generic_error(x, y, t))
            .collect();
        for ((x, y, t), err) in inputs.iter().zip(results) {
            acc.record(err, || CounterexampleInput::Solve {
                x: *x,
                y: *y,
                t: *t,
                family: Family::Mplus,
            });
        }
    }

    // Blown-up t = 0 fiber: (d, v) grid solved in both families; the first
    // sample exercises the reducible v = 0 limit.
    let fiber_samples = (plan.samples_per_suite / 4).max(100);
    for i in 0..fiber_samples {
        let d = sampler.sphere_point();
        let v = if i == 0 {
            SpherePoint::zero()
        } else {
            SpherePoint::from_affine(Complex64::from_polar(
                sampler.log_range(1e-3, 1e3),
                sampler.angle(),
            ))
        };
        for family in [Family::Mplus, Family::Mminus] {
            let err = fiber_solve_error(&d, &v, family);
            acc.record(err, || CounterexampleInput::FiberSolve { d, v, family });
        }
    }

    // Diagonal points must be rejected: their preimage is K, not the open
    // families.
    let injected = (plan.samples_per_suite / 10).max(50);
    for _ in 0..injected {
        let q = sampler.sphere_point();
        let t = sampler.circle_point(plan.t_shells[0]);
        let err = diagonal_injection_error(&q, &t);
        if err == 0.0 {
            acc.expected_rejections += 1;
        }
        acc.record(err, || CounterexampleInput::DiagonalInjection { q, t });
    }

    // Pairwise disjointness of fiber images within each family, plus the
    // t = 0 statement through distinct normal directions.
    for _ in 0..200 {
        let p1 = sampler.interior_params(K_EXCLUSION);
        let mut p2 = sampler.interior_params(K_EXCLUSION);
        if p1.family() != p2.family() {
            p2 = swap_involution(&p2);
        }
        let t = sampler.circle_point(plan.t_shells[plan.t_shells.len() / 2]);
        let err = disjointness_error(&p1, &p2, &t);
        acc.record(err, || CounterexampleInput::DisjointPair {
            d1: p1.d(),
            a1: p1.a(),
            d2: p2.d(),
            a2: p2.a(),
            t,
        });
        // Same base point, distinct interior a: normal directions differ.
        if let (Ok(f1), Ok(f2)) = (
            fiber_zero_point(&LineParams::new(p1.d(), p1.a())),
            fiber_zero_point(&LineParams::new(p1.d(), p2.a())),
        ) {
            if p1.a().chordal_distance(&p2.a()) > 1e-6 {
                let err = if f1.v.chordal_distance(&f2.v) <= 1e-12 {
                    1.0
                } else {
                    0.0
                };
                acc.record(err, || CounterexampleInput::DisjointPair {
                    d1: p1.d(),
                    a1: p1.a(),
                    d2: p1.d(),
                    a2: p2.a(),
                    t,
                });
            }
        }
    }

    // The minus family keeps its reducible members: boundary points
    // y = antipodal(x) are covered by the a = infinity limits.
    let mut c2_seen = 0usize;
    let c2_samples = 50;
    for _ in 0..c2_samples {
        let x = sampler.sphere_point();
        let t = sampler.circle_point(plan.t_shells[0]);
        let err = boundary_c2_error(&x, &t);
        if err == 0.0 {
            c2_seen += 1;
        }
        acc.record(err, || CounterexampleInput::BoundaryC2 { x, t });
    }
    acc.notes.push(format!(
        "reducible (C2) members present in m- at {c2_seen}/{c2_samples} boundary points"
    ));

    acc.finish()
}

fn run_params_suite(
    plan: &VerificationPlan,
    name: &'static str,
    sample: impl Fn(&mut Sampler) -> (SpherePoint, SpherePoint, SpherePoint),
    error: impl Fn(&SpherePoint, &SpherePoint, &SpherePoint) -> f64 + Sync,
) -> SuiteReport {
    let mut acc = SuiteAccumulator::new(name, plan.tolerance(name));
    let mut sampler = Sampler::new(plan.suite_seed(name));
    let inputs: Vec<_> = (0..plan.samples_per_suite)
        .map(|_| sample(&mut sampler))
        .collect();
    let errors: Vec<f64> = inputs.par_iter().map(|(d, a, t)| error(d, a, t)).collect();
    for ((d, a, t), err) in inputs.iter().zip(errors) {
        acc.record(err, || CounterexampleInput::ParamsAtT {
            d: *d,
            a: *a,
            t: *t,
        });
    }
    acc.finish()
}

fn generic_t(s: &mut Sampler) -> SpherePoint {
    s.bounded_point(0.05, 20.0)
}

pub fn verify_reality(plan: &VerificationPlan) -> SuiteReport {
    run_params_suite(
        plan,
        "reality",
        |s| {
            let p = s.interior_params(K_EXCLUSION);
            (p.d(), p.a(), generic_t(s))
        },
        reality_error,
    )
}

pub fn verify_k_in_q(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("k_in_q");
    let mut acc = SuiteAccumulator::new("k_in_q", tol);
    let mut sampler = Sampler::new(plan.suite_seed("k_in_q"));
    for i in 0..plan.samples_per_suite {
        if i % 2 == 0 {
            let p = sampler.k_params();
            let t = generic_t(&mut sampler);
            acc.record(k_in_q_error(&p.d(), &p.a(), &t), || {
                CounterexampleInput::ParamsAtT {
                    d: p.d(),
                    a: p.a(),
                    t,
                }
            });
        } else {
            // Negative control: away from K the curve leaves the quadric on
            // the bounded shells.
            let d = sampler.sphere_point();
            let m = if sampler.uniform() < 0.5 {
                sampler.log_range(0.05, 0.99)
            } else {
                sampler.log_range(1.01, 20.0)
            };
            let a = SpherePoint::from_affine(Complex64::from_polar(m, sampler.angle()));
            let t = sampler.bounded_point(0.5, 2.0);
            let p = eval_line(&LineParams::new(d, a), &t).unwrap();
            let err = if on_q(&p, &ChordalTolerance::default()) {
                f64::INFINITY
            } else {
                0.0
            };
            acc.record(err, || CounterexampleInput::ParamsAtT { d, a, t });
        }
    }
    acc.finish()
}

pub fn verify_trajectory(plan: &VerificationPlan) -> SuiteReport {
    run_params_suite(
        plan,
        "trajectory",
        |s| {
            let p = s.interior_params(1e-9);
            (p.d(), p.a(), generic_t(s))
        },
        trajectory_error,
    )
}

pub fn verify_trajectory_factored(plan: &VerificationPlan) -> SuiteReport {
    run_params_suite(
        plan,
        "trajectory_factored",
        |s| {
            let p = s.interior_params(1e-9);
            (p.d(), p.a(), generic_t(s))
        },
        trajectory_factored_error,
    )
}

pub fn verify_jacobian_fd(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("jacobian_fd");
    let mut acc = SuiteAccumulator::new("jacobian_fd", tol);
    let mut sampler = Sampler::new(plan.suite_seed("jacobian_fd"));
    let n = plan.samples_per_suite.min(1000);
    let mut inputs = Vec::with_capacity(n);
    while inputs.len() < n {
        let d = Complex64::from_polar(sampler.log_range(0.1, 10.0), sampler.angle());
        let m = sampler.log_range(0.1, 10.0);
        if (m - 1.0).abs() < K_EXCLUSION {
            continue;
        }
        let a = Complex64::from_polar(m, sampler.angle());
        let t = Complex64::from_polar(sampler.log_range(0.5, 2.0), sampler.angle());
        // Keep the finite-difference stencil well inside the affine chart.
        let p = eval_line(
            &LineParams::from_affine(d, a),
            &SpherePoint::from_affine(t),
        )
        .unwrap();
        let bounded = |z: &SpherePoint| z.to_affine().map(|w| w.norm() < 1e3).unwrap_or(false);
        if !bounded(&p.x) || !bounded(&p.y) {
            continue;
        }
        inputs.push((
            SpherePoint::from_affine(d),
            SpherePoint::from_affine(a),
            SpherePoint::from_affine(t),
        ));
    }
    let errors: Vec<f64> = inputs
        .par_iter()
        .map(|(d, a, t)| jacobian_fd_error(d, a, t))
        .collect();
    for ((d, a, t), err) in inputs.iter().zip(errors) {
        acc.record(err, || CounterexampleInput::ParamsAtT {
            d: *d,
            a: *a,
            t: *t,
        });
    }
    acc.finish()
}

pub fn verify_jacobian_zero(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("jacobian_zero");
    let mut acc = SuiteAccumulator::new("jacobian_zero", tol);
    let mut sampler = Sampler::new(plan.suite_seed("jacobian_zero"));
    for i in 0..plan.samples_per_suite {
        if i % 2 == 0 {
            // On K the ratio |J| / scale collapses to rounding noise.
            let p = sampler.k_params();
            let t = sampler.bounded_point(0.5, 2.0);
            acc.record(jacobian_zero_ratio(&p.d(), &p.a(), &t), || {
                CounterexampleInput::ParamsAtT {
                    d: p.d(),
                    a: p.a(),
                    t,
                }
            });
        } else {
            // Off K (beyond the exclusion band) the ratio must clear the
            // same threshold.
            let d = sampler.sphere_point();
            let m = if sampler.uniform() < 0.5 {
                sampler.range(0.5, 1.0 - K_EXCLUSION)
            } else {
                sampler.range(1.0 + K_EXCLUSION, 2.0)
            };
            let a = SpherePoint::from_affine(Complex64::from_polar(m, sampler.angle()));
            let t = sampler.bounded_point(0.5, 2.0);
            let ratio = jacobian_zero_ratio(&d, &a, &t);
            let err = if ratio <= tol { f64::INFINITY } else { 0.0 };
            acc.record(err, || CounterexampleInput::ParamsAtT { d, a, t });
        }
    }
    acc.finish()
}

pub fn verify_swap(plan: &VerificationPlan) -> SuiteReport {
    run_params_suite(
        plan,
        "swap",
        |s| {
            let p = if s.uniform() < 0.2 {
                s.k_params()
            } else {
                s.interior_params(1e-9)
            };
            (p.d(), p.a(), generic_t(s))
        },
        swap_error,
    )
}

pub fn verify_equivariance(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("equivariance");
    let mut acc = SuiteAccumulator::new("equivariance", tol);
    let mut sampler = Sampler::new(plan.suite_seed("equivariance"));
    for _ in 0..plan.samples_per_suite {
        let g = sampler.group_element();
        let p = sampler.interior_params(K_EXCLUSION);
        let t = generic_t(&mut sampler);
        acc.record(equivariance_error(&g, &p.d(), &p.a(), &t), || {
            CounterexampleInput::Action {
                g,
                d: p.d(),
                a: p.a(),
                t,
            }
        });
    }
    acc.finish()
}

pub fn verify_group_law(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("group_law");
    let mut acc = SuiteAccumulator::new("group_law", tol);
    let mut sampler = Sampler::new(plan.suite_seed("group_law"));
    for _ in 0..plan.samples_per_suite {
        let g = sampler.group_element();
        let h = sampler.group_element();
        let p = sampler.interior_params(1e-9);
        let t = generic_t(&mut sampler);
        acc.record(group_law_error(&g, &h, &p.d(), &p.a(), &t), || {
            CounterexampleInput::GroupPair {
                g,
                h,
                d: p.d(),
                a: p.a(),
                t,
            }
        });
    }
    acc.finish()
}

pub fn verify_degeneration(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("degeneration");
    let mut acc = SuiteAccumulator::new("degeneration", tol);
    let mut sampler = Sampler::new(plan.suite_seed("degeneration"));
    let cases = (plan.samples_per_suite / 100).clamp(8, 64);
    for _ in 0..cases {
        let d = sampler.sphere_point();
        let phase = sampler.angle();
        acc.record(degeneration_shortfall(&d, phase), || {
            CounterexampleInput::Degeneration { d, phase }
        });
    }
    acc.finish()
}

pub fn verify_limit_structure(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("limit_structure");
    let mut acc = SuiteAccumulator::new("limit_structure", tol);
    let mut sampler = Sampler::new(plan.suite_seed("limit_structure"));
    for _ in 0..plan.samples_per_suite {
        let d1 = sampler.sphere_point();
        let d2 = if sampler.uniform() < 0.25 {
            d1
        } else {
            sampler.sphere_point()
        };
        acc.record(limit_pair_error(&d1, &d2), || CounterexampleInput::LimitPair {
            d1,
            d2,
        });
    }
    acc.finish()
}

pub fn verify_transport(plan: &VerificationPlan) -> SuiteReport {
    let tol = plan.tolerance("transport");
    let mut acc = SuiteAccumulator::new("transport", tol);
    let mut sampler = Sampler::new(plan.suite_seed("transport"));
    let pairs = plan.samples_per_suite.clamp(200, 400);
    for i in 0..pairs {
        let src = sampler.k_params();
        let dst = if i % 10 == 0 { src } else { sampler.k_params() };
        acc.record(transport_error(&src, &dst), || {
            CounterexampleInput::Transport {
                src_d: src.d(),
                src_a: src.a(),
                dst_d: dst.d(),
                dst_a: dst.a(),
            }
        });
    }
    // Isotropy: the element returned for src = dst acts trivially on K.
    let base = LineParams::from_affine(Complex64::ZERO, Complex64::ONE);
    if let Ok(g) = transport_on_k(&base, &base) {
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let k = sampler.k_params();
            worst = worst.max(params_error(&act_on_params(&g, &k), &k));
        }
        acc.record(worst, || CounterexampleInput::Transport {
            src_d: base.d(),
            src_a: base.a(),
            dst_d: base.d(),
            dst_a: base.a(),
        });
        acc.notes
            .push(format!("identity transport acts trivially on K (max {worst:.3e})"));
    }
    acc.finish()
}

/// Runs one suite by name.
pub fn verify_suite(plan: &VerificationPlan, name: &str) -> Result<SuiteReport> {
    plan.validate()?;
    match name {
        "foliation" => Ok(verify_foliation(plan)),
        "reality" => Ok(verify_reality(plan)),
        "k_in_q" => Ok(verify_k_in_q(plan)),
        "trajectory" => Ok(verify_trajectory(plan)),
        "trajectory_factored" => Ok(verify_trajectory_factored(plan)),
        "jacobian_fd" => Ok(verify_jacobian_fd(plan)),
        "jacobian_zero" => Ok(verify_jacobian_zero(plan)),
        "swap" => Ok(verify_swap(plan)),
        "equivariance" => Ok(verify_equivariance(plan)),
        "group_law" => Ok(verify_group_law(plan)),
        "degeneration" => Ok(verify_degeneration(plan)),
        "limit_structure" => Ok(verify_limit_structure(plan)),
        "transport" => Ok(verify_transport(plan)),
        _ => Err(TwistorError::InvalidPlan(format!("unknown suite {name}"))),
    }
}

/// Runs every suite and aggregates the overall status. Suites are
/// independent; results are merged in canonical order regardless of
/// completion order.
pub fn verify_all(plan: &VerificationPlan) -> Result<VerificationReport> {
    plan.validate()?;
    let suites: Vec<SuiteReport> = SUITE_NAMES
        .par_iter()
        .map(|name| verify_suite(plan, name).expect("known suite"))
        .collect();
    let status = if suites.iter().all(|s| s.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        plan: plan.clone(),
        suites,
        status,
    })
}
