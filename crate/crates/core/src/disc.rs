//! Points and sequences in the open unit disc, the pseudohyperbolic metric,
//! and truncated Carleson infima evaluated in the log domain.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimum pseudohyperbolic separation for two points to count as distinct.
pub const SEPARATION_EPS: f64 = 1e-12;

/// A point strictly inside the unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint(Complex64);

impl DiscPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(x, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() && z.norm_sqr() < 1.0 && z.norm() < 1.0 {
            Ok(Self(z))
        } else {
            Err(Error::PointOutsideDisc {
                index: 0,
                re: z.re,
                im: z.im,
            })
        }
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.0.re
    }

    #[inline]
    pub fn im(self) -> f64 {
        self.0.im
    }

    #[inline]
    pub fn modulus(self) -> f64 {
        self.0.norm()
    }

    /// `1 − |z|²`, computed as `(1 − |z|)(1 + |z|)` to keep relative accuracy
    /// near the boundary.
    #[inline]
    pub fn one_minus_modulus_sq(self) -> f64 {
        let r = self.modulus();
        (1.0 - r) * (1.0 + r)
    }

    /// Normalising weight `√(1 − |z|²)` of the Szegő kernel at this point.
    #[inline]
    pub fn weight(self) -> f64 {
        self.one_minus_modulus_sq().sqrt()
    }
}

/// Pseudohyperbolic distance `|a − b| / |1 − conj(a)·b|`.
///
/// The denominator is evaluated as `(1 − |a|²) + conj(a)(a − b)`, which avoids
/// cancellation when both points crowd the boundary.
pub fn pseudohyperbolic_distance(a: DiscPoint, b: DiscPoint) -> f64 {
    let (za, zb) = (a.value(), b.value());
    let diff = za - zb;
    let num = diff.norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = Complex64::from(a.one_minus_modulus_sq()) + za.conj() * diff;
    (num / den.norm()).min(1.0 - f64::EPSILON / 2.0)
}

/// An ordered list of pairwise distinct points strictly inside the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscSequence {
    points: Vec<DiscPoint>,
    label: String,
}

impl DiscSequence {
    /// Validates separation (`ρ ≥ SEPARATION_EPS` for every pair).
    pub fn new(points: Vec<DiscPoint>, label: impl Into<String>) -> Result<Self> {
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = pseudohyperbolic_distance(points[i], points[j]);
                if d < SEPARATION_EPS {
                    return Err(Error::NearCollision {
                        first: i,
                        second: j,
                        distance: d,
                    });
                }
            }
        }
        Ok(Self {
            points,
            label: label.into(),
        })
    }

    /// Validates raw complex values, reporting the index of any point on or
    /// outside the unit circle.
    pub fn from_complex(values: &[Complex64], label: impl Into<String>) -> Result<Self> {
        let points = values
            .iter()
            .enumerate()
            .map(|(index, &z)| {
                DiscPoint::from_complex(z).map_err(|_| Error::PointOutsideDisc {
                    index,
                    re: z.re,
                    im: z.im,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, label)
    }

    pub fn from_reals(values: &[f64], label: impl Into<String>) -> Result<Self> {
        let values: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_complex(&values, label)
    }

    pub fn points(&self) -> &[DiscPoint] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.value()).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.weight()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|p| p.modulus()).fold(0.0, f64::max)
    }

    /// The first `k` points. Sub-sequences of a valid sequence are valid.
    pub fn prefix(&self, k: usize) -> DiscSequence {
        DiscSequence {
            points: self.points[..k.min(self.points.len())].to_vec(),
            label: self.label.clone(),
        }
    }
}

/// Checks every point and every pair, as [`DiscSequence::from_complex`].
pub fn validate_disc_sequence(points: &[Complex64]) -> Result<DiscSequence> {
    DiscSequence::from_complex(points, "explicit")
}

/// Truncated Carleson statistic `min_n ∏_{k≠n} ρ(λ_k, λ_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlesonInfimum {
    pub value: f64,
    /// Natural log of `value`; finite even when `value` underflows.
    pub log_value: f64,
    /// Zero-based index of the minimising point (first one on ties).
    pub argmin: usize,
}

/// `Σ_{k≠n} log ρ(p_k, p_n)` for every `n`, the building block of all
/// Carleson products here.
pub(crate) fn log_products(points: &[DiscPoint]) -> Vec<f64> {
    let k = points.len();
    let mut sums = vec![0.0f64; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let l = pseudohyperbolic_distance(points[i], points[j]).ln();
            sums[i] += l;
            sums[j] += l;
        }
    }
    sums
}

pub(crate) fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Carleson infimum over the finite sequence. A singleton gives the empty
/// product, 1.
pub fn carleson_infimum(seq: &DiscSequence) -> CarlesonInfimum {
    if seq.len() <= 1 {
        return CarlesonInfimum {
            value: 1.0,
            log_value: 0.0,
            argmin: 0,
        };
    }
    let sums = log_products(seq.points());
    let argmin = argmin_first(&sums);
    CarlesonInfimum {
        value: sums[argmin].exp(),
        log_value: sums[argmin],
        argmin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(re: f64) -> DiscPoint {
        DiscPoint::real(re).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(pseudohyperbolic_distance(p(0.3), p(0.3)), 0.0);
        assert!((pseudohyperbolic_distance(p(0.0), p(0.5)) - 0.5).abs() < 1e-15);
        assert!((pseudohyperbolic_distance(p(0.5), p(-0.5)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        assert!(DiscSequence::from_reals(&[0.1, 0.2, 0.3], "ok").is_ok());
        assert!(matches!(
            DiscSequence::from_reals(&[0.5, 0.5], "dup"),
            Err(Error::NearCollision {
                first: 0,
                second: 1,
                ..
            })
        ));
        assert!(matches!(
            DiscSequence::from_reals(&[0.2, 1.0], "edge"),
            Err(Error::PointOutsideDisc { index: 1, .. })
        ));
        assert!(DiscPoint::new(f64::NAN, 0.0).is_err());
        assert!(DiscPoint::new(0.8, 0.6).is_err());
    }

    #[test]
    fn carleson_small_cases() {
        let single = DiscSequence::from_reals(&[0.3], "s").unwrap();
        let r = carleson_infimum(&single);
        assert_eq!((r.value, r.argmin), (1.0, 0));

        let pair = DiscSequence::from_reals(&[0.0, 0.5], "p").unwrap();
        let r = carleson_infimum(&pair);
        assert!((r.value - 0.5).abs() < 1e-15);
        assert_eq!(r.argmin, 0);
    }

    #[test]
    fn carleson_geometric_half_twelve_points() {
        // 40-digit brute-force double loop: 0.016886832666488143904..., argmin n = 7 (1-based)
        let pts: Vec<f64> = (1..=12).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        let seq = DiscSequence::from_reals(&pts, "geo").unwrap();
        let r = carleson_infimum(&seq);
        assert!((r.value - 0.016_886_832_666_488_144).abs() < 1e-13);
        assert_eq!(r.argmin, 6);
    }

    fn arb_point(max_r: f64) -> impl Strategy<Value = DiscPoint> {
        (0.0..max_r, 0.0..std::f64::consts::TAU)
            .prop_map(|(r, t)| DiscPoint::from_complex(Complex64::from_polar(r, t)).unwrap())
    }

    proptest! {
        #[test]
        fn distance_is_symmetric(a in arb_point(0.999), b in arb_point(0.999)) {
            let d1 = pseudohyperbolic_distance(a, b);
            let d2 = pseudohyperbolic_distance(b, a);
            prop_assert!((d1 - d2).abs() <= 1e-14);
            prop_assert!((0.0..1.0).contains(&d1));
        }

        #[test]
        fn distance_dominates_modulus_gap(a in arb_point(0.999), b in arb_point(0.999)) {
            let (hi, lo) = if a.modulus() >= b.modulus() { (a, b) } else { (b, a) };
            let bound = (hi.modulus() - lo.modulus()) / (1.0 - hi.modulus() * lo.modulus());
            prop_assert!(pseudohyperbolic_distance(hi, lo) >= bound - 1e-12);
        }

        #[test]
        fn carleson_value_permutation_invariant(
            pts in proptest::collection::vec(arb_point(0.95), 2..9),
            rot in 0usize..8,
        ) {
            let Ok(seq) = DiscSequence::new(pts.clone(), "a") else { return Ok(()); };
            let mut shuffled = pts.clone();
            let r = rot % shuffled.len();
            shuffled.rotate_left(r);
            shuffled.reverse();
            let other = DiscSequence::new(shuffled.clone(), "b").unwrap();
            let c1 = carleson_infimum(&seq);
            let c2 = carleson_infimum(&other);
            prop_assert!((c1.log_value - c2.log_value).abs() <= 1e-10 * c1.log_value.abs().max(1.0));
            let sums = log_products(&pts);
            let moved = pts.iter().position(|q| *q == shuffled[c2.argmin]).unwrap();
            prop_assert!((sums[moved] - c1.log_value).abs() <= 1e-10 * c1.log_value.abs().max(1.0));
        }

        #[test]
        fn log_domain_matches_direct_product(pts in proptest::collection::vec(arb_point(0.9), 1..=12)) {
            let Ok(seq) = DiscSequence::new(pts.clone(), "x") else { return Ok(()); };
            let direct = (0..pts.len())
                .map(|n| {
                    (0..pts.len())
                        .filter(|&k| k != n)
                        .map(|k| pseudohyperbolic_distance(pts[k], pts[n]))
                        .product::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            let v = carleson_infimum(&seq).value;
            prop_assert!((v - direct).abs() <= 1e-12 * direct.max(f64::MIN_POSITIVE));
        }
    }
}
