//! Truncated power series solutions of one-parameter polynomial systems.
//!
//! Newton's method is run over the field of truncated Laurent series: each
//! step linearizes the Jacobian into a matrix series, then solves either the
//! staggered system (regular leading block) or the block lower-triangular
//! Hermite-Laurent system through a lower triangular echelon form.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the usual double-precision instantiation.

pub mod error;
pub mod job;
pub mod matrix;
pub mod newton;
pub mod pade;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod serieslinalg;

pub use error::{Error, Result};
pub use job::{parse_job, Job, Transform};
pub use matrix::Matrix;
pub use newton::{
    classify_start, newton_step, polynomial_residual_order, residual_order, run, NewtonRun, RunOptions, RunStatus,
    SolvePath, StartClassification, StartKind, StepOutcome, StepRecord, Tolerances,
};
pub use num_complex::Complex;
pub use pade::{eval_pade, pade_from_series, PadeApproximant};
pub use poly::{parse_system, Jacobian, Monomial, PolySystem, Polynomial, UnimodularTransform};
pub use scalar::Real;
pub use series::{TruncatedSeries, EXACT};
pub use serieslinalg::{
    block_solve, echelon_decompose, echelon_solve, linearize, numeric_rank, staggered_solve, EchelonDecomposition,
    MatrixSeries, VectorSeries,
};

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
/// Double-precision series.
pub type Series = TruncatedSeries<f64>;
/// Double-precision polynomial system.
pub type System = PolySystem<f64>;
/// Double-precision Padé approximant.
pub type Pade = PadeApproximant<f64>;
