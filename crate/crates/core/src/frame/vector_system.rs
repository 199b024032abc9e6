use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::iterated::{FrameOperatorMatrix, IteratedSystem, Provenance};
use crate::linalg::{norm, CMatrix, CVector};

/// Tolerance for `‖T f_k − f_{k+1}‖` when a representation is asserted.
pub const REP_TOL: f64 = 1e-10;

/// An explicit finite family `{f_k}` in `ℂ^M`, optionally with an operator
/// `T` meant to satisfy `T f_k = f_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSystem {
    vectors: Vec<CVector>,
    rep_operator: Option<CMatrix>,
}

impl VectorSystem {
    /// Checks dimensions only; the representation may be inexact.
    pub fn new(vectors: Vec<CVector>, rep_operator: Option<CMatrix>) -> Result<Self> {
        let dim = vectors.first().map_or(0, |v| v.len());
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        if let Some(t) = &rep_operator {
            if t.nrows() != dim || t.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.nrows().max(t.ncols()),
                });
            }
        }
        Ok(Self {
            vectors,
            rep_operator,
        })
    }

    /// Like [`VectorSystem::new`] but also requires the operator to shift the
    /// family within [`REP_TOL`].
    pub fn with_checked_representation(
        vectors: Vec<CVector>,
        rep_operator: CMatrix,
    ) -> Result<Self> {
        let vs = Self::new(vectors, Some(rep_operator))?;
        let residual = representation_residual(&vs)?;
        if residual > REP_TOL {
            return Err(Error::ToleranceNotReached {
                max_iterations: 0,
                residual,
            });
        }
        Ok(vs)
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn rep_operator(&self) -> Option<&CMatrix> {
        self.rep_operator.as_ref()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    /// Gram matrix `⟨f_k, f_j⟩`; its nonzero spectrum is that of the frame
    /// operator of the family.
    pub fn gram(&self) -> FrameOperatorMatrix {
        let n = self.len();
        let mut g = CMatrix::zeros(n, n);
        for j in 0..n {
            for k in j..n {
                let v = self.vectors[j].dotc(&self.vectors[k]);
                g[(j, k)] = v.conj();
                g[(k, j)] = v;
            }
            g[(j, j)].im = 0.0;
        }
        FrameOperatorMatrix::new_unchecked(g, Provenance::Gram)
    }

    /// `V c = Σ_k c_k f_k` over the leading `c.len()` vectors.
    pub fn synthesize(&self, c: &[Complex64]) -> CVector {
        self.combine(c, 0)
    }

    /// `V(𝒯c) = Σ_k c_k f_{k+1}`, synthesis of the right-shifted sequence.
    pub fn synthesize_shifted(&self, c: &[Complex64]) -> CVector {
        self.combine(c, 1)
    }

    fn combine(&self, c: &[Complex64], offset: usize) -> CVector {
        let mut out = CVector::zeros(self.dim());
        for (ck, f) in c.iter().zip(&self.vectors[offset..]) {
            out.axpy(*ck, f, Complex64::new(1.0, 0.0));
        }
        out
    }
}

/// `max_k ‖T f_k − f_{k+1}‖ / max(‖f_{k+1}‖, 1)`.
pub fn representation_residual(vs: &VectorSystem) -> Result<f64> {
    let t = vs.rep_operator().ok_or(Error::MissingOperator)?;
    if vs.len() < 2 {
        return Err(Error::InsufficientVectors {
            needed: 2,
            found: vs.len(),
        });
    }
    Ok(vs
        .vectors()
        .windows(2)
        .map(|w| norm(&(t * &w[0] - &w[1])) / norm(&w[1]).max(1.0))
        .fold(0.0, f64::max))
}

/// Empirical lower estimate of the best constant `K` in
/// `‖V(𝒯c)‖ ≤ K‖Vc‖` over finite sequences `c`.
///
/// Each trial draws a length uniformly from `1..=max_len` and components
/// uniformly from the complex unit square `[0,1) × [0,1)`, using a ChaCha
/// stream seeded with `seed`.
pub fn shift_domination_constant(
    vs: &VectorSystem,
    trials: usize,
    max_len: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 || max_len == 0 {
        return Err(Error::InvalidArgument(
            "trials and max_len must be positive".into(),
        ));
    }
    if vs.len() < max_len + 1 {
        return Err(Error::InsufficientVectors {
            needed: max_len + 1,
            found: vs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..trials {
        let len = rng.random_range(1..=max_len);
        let c: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let base = norm(&vs.synthesize(&c));
        if base == 0.0 {
            continue;
        }
        best = best.max(norm(&vs.synthesize_shifted(&c)) / base);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    /// `f_k = e_k + e_{k+1}`: Bessel, complete, but not a frame.
    OverlapBasis,
    /// `φ_n = 2ⁿ f_n` over an iterated system, represented by `2T`.
    ScaledFrame,
    /// The orbit `{Tⁿh}` of an iterated system, represented by `diag(λ)`.
    FromIterated,
}

/// Builds one of the reference vector systems with `size` vectors.
pub fn generate_fixture(
    kind: FixtureKind,
    size: usize,
    base: Option<&IteratedSystem>,
) -> Result<VectorSystem> {
    if size < 1 {
        return Err(Error::InvalidArgument(
            "fixture size must be positive".into(),
        ));
    }
    match kind {
        FixtureKind::OverlapBasis => {
            if size < 2 {
                return Err(Error::InvalidArgument(
                    "overlap basis needs size >= 2".into(),
                ));
            }
            let dim = size + 1;
            let one = Complex64::new(1.0, 0.0);
            let vectors = (0..size)
                .map(|k| {
                    let mut v = CVector::zeros(dim);
                    v[k] = one;
                    v[k + 1] = one;
                    v
                })
                .collect();
            let shift = CMatrix::from_fn(dim, dim, |i, j| {
                if i == j + 1 {
                    one
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            VectorSystem::new(vectors, Some(shift))
        }
        FixtureKind::FromIterated | FixtureKind::ScaledFrame => {
            let base = base.ok_or(Error::MissingBase)?;
            let scale = if kind == FixtureKind::ScaledFrame {
                2.0
            } else {
                1.0
            };
            let lambdas = base.eigenvalues().values();
            let diag = CVector::from_iterator(lambdas.len(), lambdas.iter().copied());
            let mut f = CVector::from_iterator(
                base.len(),
                base.weights().iter().map(|&w| Complex64::from(w)),
            );
            let mut vectors = Vec::with_capacity(size);
            let mut factor = 1.0;
            for _ in 0..size {
                vectors.push(&f * Complex64::from(factor));
                f = f.component_mul(&diag);
                factor *= scale;
            }
            let t = CMatrix::from_diagonal(&(diag * Complex64::from(scale)));
            VectorSystem::new(vectors, Some(t))
        }
    }
}
