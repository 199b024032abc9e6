use num_complex::Complex64;

use crate::disc::DiscSequence;
use crate::error::{Error, Result};
use crate::frame::bounds::{frame_bounds, A_FLOOR};
use crate::linalg::{conjugate_gradient, hermitian_asymmetry, CMatrix, CVector};

/// Orbit `{Tⁿh}_{n=0..N}` of the diagonal operator `T e_k = λ_k e_k` applied
/// to `h = Σ_k √(1 − |λ_k|²) e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedSystem {
    eigenvalues: DiscSequence,
    weights: Vec<f64>,
    iteration_order: usize,
}

impl IteratedSystem {
    pub fn new(eigenvalues: DiscSequence, iteration_order: usize) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::SequenceTooShort {
                needed: 1,
                found: 0,
            });
        }
        let weights = eigenvalues.weights();
        Ok(Self {
            eigenvalues,
            weights,
            iteration_order,
        })
    }

    pub fn eigenvalues(&self) -> &DiscSequence {
        &self.eigenvalues
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest power `N`; the system has `N + 1` vectors.
    pub fn iteration_order(&self) -> usize {
        self.iteration_order
    }

    /// Number of eigenvalues `K`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn with_iteration_order(&self, iteration_order: usize) -> Self {
        Self {
            iteration_order,
            ..self.clone()
        }
    }
}

/// The `K × (N+1)` matrix whose column `n` holds the coordinates of `Tⁿh`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisMatrix {
    entries: CMatrix,
}

impl SynthesisMatrix {
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn iteration_order(&self) -> usize {
        self.entries.ncols() - 1
    }
}

/// Entry `(k, n) = w_k λ_kⁿ`, with `0⁰ = 1`.
pub fn build_synthesis(system: &IteratedSystem) -> SynthesisMatrix {
    let k = system.len();
    let cols = system.iteration_order + 1;
    let mut entries = CMatrix::zeros(k, cols);
    for (row, (p, &w)) in system
        .eigenvalues
        .points()
        .iter()
        .zip(&system.weights)
        .enumerate()
    {
        let lambda = p.value();
        let mut acc = Complex64::new(w, 0.0);
        for n in 0..cols {
            entries[(row, n)] = acc;
            acc *= lambda;
        }
    }
    SynthesisMatrix { entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// `V Vᴴ` over the powers `0..=N`.
    Truncated(usize),
    /// Limit `N → ∞`, the Gram matrix of normalised Szegő kernels.
    ClosedForm,
    /// Gram matrix `⟨f_j, f_k⟩` of an explicit vector family.
    Gram,
    /// Kronecker product of two factor operators.
    Kronecker,
}

/// A Hermitian positive-semidefinite matrix whose extremal eigenvalues are
/// frame (or Riesz) bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameOperatorMatrix {
    entries: CMatrix,
    provenance: Provenance,
}

impl FrameOperatorMatrix {
    /// Accepts any square matrix that is Hermitian up to `1e-12` relative to
    /// its largest entry. Semidefiniteness is checked by [`frame_bounds`].
    pub fn from_hermitian(entries: CMatrix, provenance: Provenance) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let asymmetry = hermitian_asymmetry(&entries);
        if asymmetry > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self {
            entries,
            provenance,
        })
    }

    pub(crate) fn new_unchecked(entries: CMatrix, provenance: Provenance) -> Self {
        Self {
            entries,
            provenance,
        }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }
}

/// `S_N = V Vᴴ`, the explicit sum of the `N + 1` rank-one terms.
pub fn frame_operator_truncated(synth: &SynthesisMatrix) -> FrameOperatorMatrix {
    let v = synth.entries();
    let mut s = v * v.adjoint();
    // exact Hermitian symmetry, the product only guarantees it to rounding
    let n = s.nrows();
    for i in 0..n {
        s[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (s[(i, j)] + s[(j, i)].conj()) * 0.5;
            s[(i, j)] = avg;
            s[(j, i)] = avg.conj();
        }
    }
    FrameOperatorMatrix::new_unchecked(s, Provenance::Truncated(synth.iteration_order()))
}

/// `G_{jk} = w_j w_k / (1 − λ_j conj(λ_k))` for a sequence of disc points.
///
/// Off-diagonal denominators are formed as `(1 − |λ_j|²) + λ_j·conj(λ_j − λ_k)`,
/// which keeps their relative accuracy when both points approach the circle.
pub fn szego_gram(seq: &DiscSequence) -> CMatrix {
    let pts = seq.points();
    let w = seq.weights();
    let k = pts.len();
    let mut g = CMatrix::zeros(k, k);
    for j in 0..k {
        let lj = pts[j].value();
        let dj = Complex64::from(pts[j].one_minus_modulus_sq());
        for m in j..k {
            let lm = pts[m].value();
            let den = dj + lj * (lj - lm).conj();
            let v = Complex64::from(w[j] * w[m]) / den;
            g[(j, m)] = v;
            g[(m, j)] = v.conj();
        }
        // the diagonal is w_j² / (1 − |λ_j|²) = 1 identically
        g[(j, j)] = Complex64::from(1.0);
    }
    g
}

/// Limit of [`frame_operator_truncated`] as `N → ∞`.
pub fn frame_operator_closed_form(system: &IteratedSystem) -> FrameOperatorMatrix {
    FrameOperatorMatrix::new_unchecked(szego_gram(&system.eigenvalues), Provenance::ClosedForm)
}

/// Entrywise bound on `S_∞ − S_N`:
/// `max_j w_j² · r^{2(N+1)} / (1 − r²)` with `r = max_k |λ_k|`.
pub fn truncation_tail_bound(seq: &DiscSequence, iteration_order: usize) -> f64 {
    let r = seq.max_modulus();
    let wmax_sq = seq
        .points()
        .iter()
        .map(|p| p.one_minus_modulus_sq())
        .fold(0.0, f64::max);
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    wmax_sq * r.powf(2.0 * (iteration_order as f64 + 1.0)) / one_minus_r2
}

/// Smallest `N` with `K·r^{2(N+1)} / (1 − r²) ≤ tail_tol`.
pub fn select_iteration_order(seq: &DiscSequence, tail_tol: f64) -> usize {
    let r = seq.max_modulus();
    if r == 0.0 {
        return 0;
    }
    let k = seq.len() as f64;
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    let bound = |n: usize| k * r.powf(2.0 * (n as f64 + 1.0)) / one_minus_r2;
    let estimate = ((tail_tol * one_minus_r2 / k).ln() / (2.0 * r.ln()) - 1.0).ceil();
    let mut n = if estimate.is_finite() && estimate > 0.0 {
        estimate as usize
    } else {
        0
    };
    while n > 0 && bound(n - 1) <= tail_tol {
        n -= 1;
    }
    while bound(n) > tail_tol {
        n += 1;
    }
    n
}

/// Analysis coefficients `c_n = ⟨x, Tⁿh⟩ = (Vᴴ x)_n`.
pub fn analyze(system: &IteratedSystem, x: &CVector) -> Result<CVector> {
    if x.len() != system.len() {
        return Err(Error::DimensionMismatch {
            expected: system.len(),
            found: x.len(),
        });
    }
    let v = build_synthesis(system);
    Ok(v.entries().adjoint() * x)
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub x: CVector,
    pub iterations: usize,
}

/// Recovers `x` from frame coefficients by solving `S x = V c` with conjugate
/// gradients on the closed-form frame operator. `tol` is the relative
/// residual target.
pub fn reconstruct(system: &IteratedSystem, coeffs: &CVector, tol: f64) -> Result<Reconstruction> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let expected = system.iteration_order + 1;
    if coeffs.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: coeffs.len(),
        });
    }
    let s = frame_operator_closed_form(system);
    let bounds = frame_bounds(&s, 1e-10)?;
    if bounds.lower < A_FLOOR {
        return Err(Error::NotAFrame {
            lower: bounds.lower,
            floor: A_FLOOR,
        });
    }
    let v = build_synthesis(system);
    let rhs = v.entries() * coeffs;
    let k = system.len();
    let sol = conjugate_gradient(|y| s.entries() * y, &rhs, tol, 50 * k + 200)?;
    Ok(Reconstruction {
        x: sol.x,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm;

    fn system(points: &[f64], n: usize) -> IteratedSystem {
        IteratedSystem::new(DiscSequence::from_reals(points, "t").unwrap(), n).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn synthesis_examples() {
        let v = build_synthesis(&system(&[0.0], 3));
        assert_eq!(
            v.entries().row(0).iter().copied().collect::<Vec<_>>(),
            vec![c(1.0), c(0.0), c(0.0), c(0.0)]
        );

        let s = 0.75f64.sqrt();
        let v = build_synthesis(&system(&[0.5], 2));
        for (n, want) in [s, 0.5 * s, 0.25 * s].into_iter().enumerate() {
            assert!((v.entries()[(0, n)] - c(want)).norm() < 1e-15);
        }

        let v = build_synthesis(&system(&[0.0, 0.5], 4));
        assert_eq!(v.entries()[(0, 0)], c(1.0));
        assert!((v.entries()[(1, 0)].re - s).abs() < 1e-15);
    }

    #[test]
    fn truncated_operator_examples() {
        for n in [0, 1, 7] {
            let s = frame_operator_truncated(&build_synthesis(&system(&[0.0], n)));
            assert_eq!(s.entries()[(0, 0)], c(1.0));
        }
        let s = frame_operator_truncated(&build_synthesis(&system(&[0.5], 2)));
        assert!((s.entries()[(0, 0)].re - 0.984375).abs() < 1e-15);
        assert_eq!(s.provenance(), Provenance::Truncated(2));

        let s = frame_operator_truncated(&build_synthesis(&system(&[0.0, 0.5], 0)));
        let r = 0.75f64.sqrt();
        let e = s.entries();
        assert!((e[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((e[(0, 1)].re - r).abs() < 1e-15 && (e[(1, 0)].re - r).abs() < 1e-15);
        assert!((e[(1, 1)].re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        let s = frame_operator_closed_form(&system(&[0.37], 0));
        assert!((s.entries()[(0, 0)].re - 1.0).abs() < 1e-15);

        let s = frame_operator_closed_form(&system(&[0.0, 0.5], 0));
        assert!((s.entries()[(0, 1)].re - 0.866_025_403_784_438_6).abs() < 1e-15);

        let s = frame_operator_closed_form(&system(&[0.5, -0.5], 0));
        assert!((s.entries()[(0, 1)].re - 0.6).abs() < 1e-15);
        assert_eq!(s.provenance(), Provenance::ClosedForm);
    }

    #[test]
    fn hermitian_check_rejects_asymmetric() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.5), c(0.2), c(1.0)]);
        assert!(matches!(
            FrameOperatorMatrix::from_hermitian(m, Provenance::Gram),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn iteration_order_selection() {
        let seq = DiscSequence::from_reals(&[0.0, 0.5, 0.9], "s").unwrap();
        let n = select_iteration_order(&seq, 1e-10);
        let bound = |n: usize| 3.0 * 0.81f64.powi(n as i32 + 1) / 0.19;
        assert!(bound(n) <= 1e-10 && bound(n - 1) > 1e-10);
        let zero = DiscSequence::from_reals(&[0.0], "z").unwrap();
        assert_eq!(select_iteration_order(&zero, 1e-10), 0);
    }

    #[test]
    fn analyze_examples() {
        let sys = system(&[0.0], 4);
        let coeffs = analyze(&sys, &CVector::from_element(1, c(1.0))).unwrap();
        assert_eq!(
            coeffs,
            CVector::from_vec(vec![c(1.0), c(0.0), c(0.0), c(0.0), c(0.0)])
        );

        let sys = system(&[0.0, 0.5], 1);
        let coeffs = analyze(&sys, &CVector::from_vec(vec![c(1.0), c(0.0)])).unwrap();
        assert_eq!(coeffs, CVector::from_vec(vec![c(1.0), c(0.0)]));
        assert_eq!(norm(&analyze(&sys, &CVector::zeros(2)).unwrap()), 0.0);

        assert!(matches!(
            analyze(&sys, &CVector::zeros(3)),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn reconstruct_examples() {
        let sys = system(&[0.0], 5);
        let coeffs = analyze(&sys, &CVector::from_element(1, c(1.0))).unwrap();
        let r = reconstruct(&sys, &coeffs, 1e-12).unwrap();
        assert!((r.x[0] - c(1.0)).norm() < 1e-14);

        let sys = system(&[0.0, 0.5], 40);
        let x = CVector::from_vec(vec![c(1.0), c(1.0)]);
        let r = reconstruct(&sys, &analyze(&sys, &x).unwrap(), 1e-13).unwrap();
        assert!(norm(&(&r.x - &x)) / norm(&x) <= 1e-10);

        let r = reconstruct(&sys, &CVector::zeros(41), 1e-12).unwrap();
        assert_eq!((norm(&r.x), r.iterations), (0.0, 0));

        assert!(matches!(
            reconstruct(&sys, &CVector::zeros(5), 1e-12),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reconstruct_refuses_near_singular_systems() {
        let sys = system(&[0.0, 1e-6, 2e-6], 10);
        assert!(matches!(
            reconstruct(&sys, &CVector::zeros(11), 1e-12),
            Err(Error::NotAFrame { .. })
        ));
    }
}
