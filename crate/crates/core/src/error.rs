use thiserror::Error;

use crate::curve::FamilyClass;
use crate::incidence::SolverTrace;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum TwistorError {
    /// A fractional transformation whose determinant modulus falls below the
    /// degeneracy floor (relative to the squared maximum coefficient modulus).
    #[error("degenerate fractional map: |det| = {det:.3e} is below the floor {floor:.3e}")]
    DegenerateMap { det: f64, floor: f64 },

    /// Homogeneous coordinates must be finite and not both zero.
    #[error("invalid homogeneous representative: components must be finite and not both zero")]
    InvalidPoint,

    /// The requested operation is undefined on the t = 0 and t = infinity fibers.
    #[error("operation is undefined on the t = 0 and t = infinity fibers")]
    InvalidFiber,

    /// No member of the open families passes through a diagonal point; the
    /// preimage of the diagonal is the K stratum.
    #[error("point lies on the diagonal x = y (chordal distance {distance:.3e}); only K covers it")]
    OnDiagonal { distance: f64 },

    /// The solver produced candidates but the forward map does not reproduce
    /// the input within tolerance.
    #[error("solver roundtrip error {roundtrip:.3e} exceeds {tolerance:.3e}")]
    NumericalFailure {
        roundtrip: f64,
        tolerance: f64,
        trace: Box<SolverTrace>,
    },

    /// Curves with |a| = 1 lie inside the quadric Q and carry no fiber-zero
    /// normal coordinate.
    #[error("curve lies in Q (|a| = 1 within tolerance); no normal coordinate exists")]
    LiesOnQ,

    /// Both endpoints of a K-transport must be on the K stratum.
    #[error("parameters are not on K (|a| = 1 required)")]
    NotOnK,

    /// The operation does not accept parameters of this family class.
    #[error("operation is undefined for parameters of class {class:?}")]
    UnsupportedClass { class: FamilyClass },

    #[error("tolerance must be a finite nonnegative number, got {0}")]
    InvalidTolerance(f64),

    #[error("radius parameter must be positive and finite, got {0}")]
    InvalidRadius(f64),

    /// Every admissible chart degenerates at the requested point.
    #[error("no coordinate chart is available at the requested point")]
    ChartUnavailable,

    /// A group element must have (alpha, beta) not both zero and g3 nonzero.
    #[error("invalid group element: norms must be nonzero and finite")]
    InvalidGroupElement,

    #[error("verification plan is invalid: {0}")]
    InvalidPlan(String),
}

pub type Result<T> = std::result::Result<T, TwistorError>;
