//! Iterated systems `{Tⁿh}` for diagonal `T`, their synthesis matrices and
//! frame operators, frame-bound estimation, reconstruction, and the checks on
//! explicit vector families represented by an operator.

mod bounds;
mod iterated;
mod vector_system;

pub use bounds::{
    frame_bounds, frame_bounds_with, BoundMethod, FrameBoundEstimate, A_FLOOR, DENSE_LIMIT, PSD_TOL,
};
pub use iterated::{
    analyze, build_synthesis, frame_operator_closed_form, frame_operator_truncated, reconstruct,
    select_iteration_order, szego_gram, truncation_tail_bound, FrameOperatorMatrix, IteratedSystem,
    Provenance, Reconstruction, SynthesisMatrix,
};
pub use vector_system::{
    generate_fixture, representation_residual, shift_domination_constant, FixtureKind,
    VectorSystem, REP_TOL,
};
