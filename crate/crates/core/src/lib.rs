//! Explicit twistor lines of the Eguchi-Hanson space.
//!
//! The twistor space of the Eguchi-Hanson metric compactifies, through
//! Nagata's classical birational construction, into curves inside
//! P^1 x P^1 x P^1. This crate computes those curve families explicitly:
//! it evaluates them, inverts the fiberwise incidence map in closed form
//! (the "unique line through a point" solver), verifies the foliation,
//! reality, degeneration and symmetry structure numerically, and exposes
//! everything to a CLI and Python bindings.
//!
//! Modules:
//! - [`sphere`]: homogeneous P^1 arithmetic and fractional maps;
//! - [`curve`]: the degree-(1,1,1) family, its trajectory curves and
//!   reducible limits;
//! - [`incidence`]: the incidence map, its Jacobian, and the solvers;
//! - [`symmetry`]: the real structure, the family-swap involution and the
//!   PSU(2) x U(1) action;
//! - [`verify`]: seeded falsification suites with machine-readable reports.

pub mod curve;
pub mod error;
pub mod incidence;
pub mod sample;
pub mod sphere;
pub mod symmetry;
pub mod verify;

pub use curve::{
    curve_csv, eval_line, eval_trajectory, eval_trajectory_factored, limit_curve, on_q, recenter,
    trajectory_map, uncenter, CurveComponent, Family, FamilyClass, LimitDirection, LineParams,
    ReducibleLimit, SpacePoint,
};
pub use error::{Result, TwistorError};
pub use incidence::{
    fiber_zero_point, incidence_map, jacobian, solve_fiber_zero, solve_line_through,
    FiberZeroPoint, Jacobian, JacobianChart, SolverTrace,
};
pub use sphere::{ChordalTolerance, FractionalMap, SpherePoint};
pub use symmetry::{
    act_on_params, act_on_space, real_structure, swap_involution, transport_on_k, GroupElement,
};
pub use verify::{
    replay, verify_all, verify_foliation, verify_suite, Counterexample, CounterexampleInput,
    Status, SuiteReport, VerificationPlan, VerificationReport,
};
