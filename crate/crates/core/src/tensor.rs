//! Two-factor systems `{T₁ⁿh₁} ⊗ {T₂ᵐh₂}`: the Carleson infimum on the
//! product points `λ_k γ_l`, Kronecker frame operators and their bounds, the
//! factorised synthesis, and the truncation sweep relating both.
//!
//! Pairs `(k, l)` flatten row-major to `k·K_B + l` (zero-based) everywhere.

use rayon::prelude::*;

use crate::disc::{argmin_first, log_products, DiscPoint, DiscSequence};
use crate::error::{Error, Result};
use crate::frame::{
    build_synthesis, frame_bounds, frame_operator_closed_form, BoundMethod, FrameBoundEstimate,
    FrameOperatorMatrix, IteratedSystem, Provenance,
};
use crate::linalg::{kron, CMatrix, CVector};
use crate::sequences::{generate, ratio_condition_constant, SequenceSpec};

/// Largest Kronecker dimension assembled for direct cross-checks.
pub const DIRECT_CHECK_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorSystem {
    pub factor_a: IteratedSystem,
    pub factor_b: IteratedSystem,
}

impl TensorSystem {
    pub fn new(factor_a: IteratedSystem, factor_b: IteratedSystem) -> Self {
        Self { factor_a, factor_b }
    }

    /// Fails with [`Error::ProductCollision`] if two products `λ_kγ_l`
    /// coincide up to [`SEPARATION_EPS`](crate::disc::SEPARATION_EPS).
    pub fn check_product_distinctness(&self) -> Result<()> {
        product_points(self.factor_a.eigenvalues(), self.factor_b.eigenvalues()).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorCoefficients {
    /// `a_n`, length `N_A + 1`.
    pub a: CVector,
    /// `b_m`, length `N_B + 1`.
    pub b: CVector,
}

/// Product points `λ_k γ_l` in row-major order, validated as pairwise
/// distinct.
pub fn product_points(seq_a: &DiscSequence, seq_b: &DiscSequence) -> Result<Vec<DiscPoint>> {
    let kb = seq_b.len();
    let points: Vec<DiscPoint> = seq_a
        .points()
        .iter()
        .flat_map(|a| {
            seq_b
                .points()
                .iter()
                .map(move |b| (a.value() * b.value(), a, b))
        })
        .map(|(z, _, _)| {
            DiscPoint::from_complex(z).expect("product of disc points lies in the disc")
        })
        .collect();
    match DiscSequence::new(points.clone(), "product") {
        Ok(_) => Ok(points),
        Err(Error::NearCollision {
            first,
            second,
            distance,
        }) => Err(Error::ProductCollision {
            first: (first / kb, first % kb),
            second: (second / kb, second % kb),
            distance,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorCarleson {
    pub value: f64,
    pub log_value: f64,
    /// Zero-based `(n, m)` of the minimising product point.
    pub argmin: (usize, usize),
}

/// `inf_{(n,m)} ∏_{(k,l)≠(n,m)} ρ(λ_kγ_l, λ_nγ_m)` on the truncated product
/// grid, evaluated in the log domain. Coinciding products are reported as
/// [`Error::ProductCollision`] instead of yielding zero.
pub fn tensor_carleson_infimum(
    seq_a: &DiscSequence,
    seq_b: &DiscSequence,
) -> Result<TensorCarleson> {
    let points = product_points(seq_a, seq_b)?;
    let kb = seq_b.len();
    if points.len() <= 1 {
        return Ok(TensorCarleson {
            value: 1.0,
            log_value: 0.0,
            argmin: (0, 0),
        });
    }
    let sums = log_products(&points);
    let idx = argmin_first(&sums);
    Ok(TensorCarleson {
        value: sums[idx].exp(),
        log_value: sums[idx],
        argmin: (idx / kb, idx % kb),
    })
}

/// `S_A ⊗ S_B` with the row-major pair flattening.
pub fn kron_frame_operator(
    sa: &FrameOperatorMatrix,
    sb: &FrameOperatorMatrix,
) -> FrameOperatorMatrix {
    FrameOperatorMatrix::new_unchecked(kron(sa.entries(), sb.entries()), Provenance::Kronecker)
}

/// Bounds of the tensor frame as products of the factor bounds computed from
/// the closed-form factor operators. Up to [`DIRECT_CHECK_LIMIT`] product
/// points the Kronecker operator is also assembled and its extremes must
/// agree within `tol·B`.
pub fn tensor_frame_bounds(ts: &TensorSystem, tol: f64) -> Result<FrameBoundEstimate> {
    let sa = frame_operator_closed_form(&ts.factor_a);
    let sb = frame_operator_closed_form(&ts.factor_b);
    let ba = frame_bounds(&sa, tol)?;
    let bb = frame_bounds(&sb, tol)?;
    let lower = ba.lower * bb.lower;
    let upper = ba.upper * bb.upper;
    let mut residual = ba.residual.max(bb.residual);
    let dim = sa.dim() * sb.dim();
    if dim <= DIRECT_CHECK_LIMIT {
        let direct = frame_bounds(&kron_frame_operator(&sa, &sb), tol)?;
        let gap = (direct.lower - lower)
            .abs()
            .max((direct.upper - upper).abs())
            / upper;
        if gap > tol {
            let (product, direct) = if (direct.lower - lower).abs() >= (direct.upper - upper).abs()
            {
                (lower, direct.lower)
            } else {
                (upper, direct.upper)
            };
            return Err(Error::CrossCheckMismatch { product, direct });
        }
        residual = residual.max(direct.residual);
    }
    Ok(FrameBoundEstimate {
        lower,
        upper,
        method: if ba.method == BoundMethod::DenseEig && bb.method == BoundMethod::DenseEig {
            BoundMethod::DenseEig
        } else {
            BoundMethod::PowerIteration
        },
        residual,
        provenance: Provenance::Kronecker,
        dim,
    })
}

/// `entry(k, l) = (Σ_n a_n λ_kⁿ w_k)·(Σ_m b_m γ_lᵐ v_l)`, i.e. the outer
/// product `(V_A a)(V_B b)ᵀ`.
pub fn tensor_synthesis_apply(ts: &TensorSystem, coeffs: &TensorCoefficients) -> Result<CMatrix> {
    let na = ts.factor_a.iteration_order() + 1;
    let nb = ts.factor_b.iteration_order() + 1;
    if coeffs.a.len() != na {
        return Err(Error::DimensionMismatch {
            expected: na,
            found: coeffs.a.len(),
        });
    }
    if coeffs.b.len() != nb {
        return Err(Error::DimensionMismatch {
            expected: nb,
            found: coeffs.b.len(),
        });
    }
    let left = build_synthesis(&ts.factor_a).entries() * &coeffs.a;
    let right = build_synthesis(&ts.factor_b).entries() * &coeffs.b;
    Ok(&left * right.transpose())
}

/// One truncation level of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub k: usize,
    /// `None` when two product points collide (the literal product is 0).
    pub carleson_trunc: Option<f64>,
    pub lower_a: f64,
    pub upper_b: f64,
    /// `None` when `K < 2`.
    pub ratio_c_hat: Option<f64>,
    pub ratio_satisfied: Option<bool>,
}

fn experiment_row(
    full_a: &DiscSequence,
    full_b: &DiscSequence,
    k: usize,
    tol: f64,
) -> Result<ExperimentRow> {
    let seq_a = full_a.prefix(k);
    let seq_b = full_b.prefix(k);
    let carleson_trunc = match tensor_carleson_infimum(&seq_a, &seq_b) {
        Ok(c) => Some(c.value),
        Err(Error::ProductCollision { .. }) => None,
        Err(e) => return Err(e),
    };
    let ts = TensorSystem::new(
        IteratedSystem::new(seq_a.clone(), 0)?,
        IteratedSystem::new(seq_b.clone(), 0)?,
    );
    let bounds = tensor_frame_bounds(&ts, tol)?;
    let ratio = if k >= 2 {
        Some(ratio_condition_constant(&seq_a, &seq_b)?)
    } else {
        None
    };
    Ok(ExperimentRow {
        k,
        carleson_trunc,
        lower_a: bounds.lower,
        upper_b: bounds.upper,
        ratio_c_hat: ratio.map(|r| r.c_hat),
        ratio_satisfied: ratio.map(|r| r.satisfied),
    })
}

/// For each `K` in `k_list`: tensor Carleson infimum of the `K × K` product
/// grid, tensor frame bounds from the closed-form factor operators, and the
/// two-factor ratio constant. Rows are independent and computed in parallel;
/// they are returned in `k_list` order.
pub fn theorem5_experiment(
    spec_a: &SequenceSpec,
    spec_b: &SequenceSpec,
    k_list: &[usize],
    tol: f64,
) -> Result<Vec<ExperimentRow>> {
    let k_max = k_list.iter().copied().max().unwrap_or(0);
    if k_list.contains(&0) {
        return Err(Error::InvalidArgument(
            "truncation sizes must be positive".into(),
        ));
    }
    for spec in [spec_a, spec_b] {
        if spec.count < k_max {
            return Err(Error::InvalidSpec(format!(
                "{spec} provides {} points, {k_max} requested",
                spec.count
            )));
        }
    }
    let full_a = generate(spec_a)?;
    let full_b = generate(spec_b)?;
    k_list
        .par_iter()
        .map(|&k| experiment_row(&full_a, &full_b, k, tol))
        .collect()
}

/// Flattened Kronecker synthesis `V_A ⊗ V_B` (used to cross-check
/// [`tensor_synthesis_apply`]).
pub fn kron_synthesis(ts: &TensorSystem) -> CMatrix {
    kron(
        build_synthesis(&ts.factor_a).entries(),
        build_synthesis(&ts.factor_b).entries(),
    )
}

/// Interprets a flattened length-`K_A·K_B` vector as a `K_A × K_B` matrix.
pub fn unflatten(v: &CVector, ka: usize, kb: usize) -> CMatrix {
    CMatrix::from_fn(ka, kb, |k, l| v[k * kb + l])
}
