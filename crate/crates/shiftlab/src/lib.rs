//! Numerical subnormality and joint hyponormality tests for one- and
//! two-variable weighted shifts.
//!
//! Everything is built on an exact calculus for finite measures on
//! `[0, M] ⊂ ℝ₊` whose continuous parts are finite sums of power densities
//! `c·t^p`. That family is closed under the transformations shift theory
//! needs (restriction tilts, pushforwards under `t ↦ t^m`, division by `t`),
//! so Berger measures can be manipulated without discretisation error.
//!
//! - [`measure1d`] — atomic + power-density measures: moments, tilts,
//!   pushforwards, signed combinations, positivity.
//! - [`measure2d`] — finite sums of product measures on a rectangle:
//!   2D moments, marginals, the extremal measure.
//! - [`shift1d`] — unilateral weighted shifts: weights ↔ moments ↔ Berger
//!   measures, backward extensions, Stampfli completion, Hankel checks.
//! - [`shift2d`] — two-variable weighted shift grids: commutativity, the
//!   Six-point Test, windowed joint k-hyponormality, subnormal backward
//!   extension with measure reconstruction.
//! - [`tensor_core`] — shifts whose core is a tensor product: the ψ/φ
//!   subnormality criterion, direct-sum power decomposition, and the
//!   power-invariance verifier.

pub mod measure1d;
pub mod measure2d;
pub mod shift1d;
pub mod shift2d;
pub mod tensor_core;
pub mod verdict;

pub use measure1d::{
    linear_combine, measure_leq, DensityPiece, Integral, Measure1D, MeasureError, PowerTerm,
};
pub use measure2d::{backward_ext_2var, Measure2D, ProductTerm};
pub use shift1d::{
    backward_extension, hankel_check, power_decompose, power_measure, restriction_measure,
    stampfli_completion, weights_from_measure, Packet, ShiftError, Tail, WeightSeq,
};
pub use shift2d::{GridError, ShiftGrid};
pub use tensor_core::{FiveTuple, GridDescriptor, PowerEntry, TcError, TheoremReport};
pub use verdict::{Verdict, Witness};

/// Default absolute tolerance for positivity verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Locations closer than this are merged when atoms are combined.
pub const ATOM_MERGE_TOL: f64 = 1e-10;
