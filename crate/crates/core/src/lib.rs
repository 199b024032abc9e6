//! Dynamical-sampling frames `{Tⁿh}` for diagonal operators with eigenvalues
//! in the unit disc, and their tensor products.
//!
//! The crate evaluates Carleson conditions on truncated sequences, builds
//! truncated and closed-form frame operators, estimates frame bounds,
//! reconstructs signals from frame coefficients and solves minimal-norm
//! interpolation problems in H².
//!
//! Indices are zero-based throughout.

pub mod disc;
pub mod error;
pub mod frame;
pub mod hardy;
pub mod linalg;
pub mod sequences;
pub mod tensor;

pub use disc::{
    carleson_infimum, pseudohyperbolic_distance, CarlesonInfimum, DiscPoint, DiscSequence,
};
pub use error::{Error, Result};
pub use sequences::{generate, Family, SequenceSpec};
