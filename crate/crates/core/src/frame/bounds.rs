use crate::error::{Error, Result};
use crate::frame::iterated::{FrameOperatorMatrix, Provenance};
use crate::linalg::{dense_extremal_eigenpairs, inverse_iteration, power_iteration, Eigenpair};

/// Lower bounds below this are treated as "not a frame" by solvers.
pub const A_FLOOR: f64 = 1e-10;

/// Largest dimension handled by a dense eigen-decomposition.
pub const DENSE_LIMIT: usize = 512;

/// Relative slack allowed for negative eigenvalues of a PSD matrix.
pub const PSD_TOL: f64 = 1e-10;

const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    DenseEig,
    /// Power iteration for the top, inverse iteration for the bottom.
    PowerIteration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameBoundEstimate {
    pub lower: f64,
    pub upper: f64,
    pub method: BoundMethod,
    /// `max ‖Sv − θv‖ / ‖S‖` over both extremal pairs.
    pub residual: f64,
    pub provenance: Provenance,
    pub dim: usize,
}

impl FrameBoundEstimate {
    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }
}

/// Frame bounds `A`, `B` as the extremal eigenvalues of `S`, certified by
/// eigen-residuals `‖Sv − θv‖ ≤ tol·‖S‖`.
pub fn frame_bounds(s: &FrameOperatorMatrix, tol: f64) -> Result<FrameBoundEstimate> {
    let method = if s.dim() <= DENSE_LIMIT {
        BoundMethod::DenseEig
    } else {
        BoundMethod::PowerIteration
    };
    frame_bounds_with(s, tol, method)
}

pub fn frame_bounds_with(
    s: &FrameOperatorMatrix,
    tol: f64,
    method: BoundMethod,
) -> Result<FrameBoundEstimate> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if s.dim() == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let m = s.entries();
    let (lo, hi): (Eigenpair, Eigenpair) = match method {
        BoundMethod::DenseEig => dense_extremal_eigenpairs(m),
        BoundMethod::PowerIteration => {
            let hi = power_iteration(m, tol, MAX_ITERATIONS)?;
            let lo = inverse_iteration(m, tol, hi.value, MAX_ITERATIONS)?;
            (lo, hi)
        }
    };
    let scale = hi.value.abs().max(f64::MIN_POSITIVE);
    if lo.value < -PSD_TOL * scale {
        return Err(Error::NotPositiveSemidefinite {
            eigenvalue: lo.value,
        });
    }
    let residual = lo.residual.max(hi.residual) / scale;
    if residual > tol {
        return Err(Error::ToleranceNotReached {
            max_iterations: lo.iterations.max(hi.iterations),
            residual,
        });
    }
    Ok(FrameBoundEstimate {
        lower: lo.value.max(0.0),
        upper: hi.value,
        method,
        residual,
        provenance: s.provenance(),
        dim: s.dim(),
    })
}
