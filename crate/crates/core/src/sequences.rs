//! Eigenvalue families with known Carleson behaviour, the weight
//! admissibility check, the two-factor ratio condition, and the certified
//! lower bound for geometric-type separation.

use std::fmt;

use num_complex::Complex64;

use crate::disc::DiscSequence;
use crate::error::{Error, Result};

/// Slack under 1 for the ratio condition to count as satisfied.
pub const RATIO_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `λ_k = 1 − c^k`.
    Geometric {
        base: f64,
    },
    /// `λ_k = 1 − k^(−p)`, so `λ_1 = 0`.
    Polynomial {
        power: f64,
    },
    /// `λ_k = (1 − c^k)·exp(i·k·phase_step)`.
    GeometricWithPhases {
        base: f64,
        phase_step: f64,
    },
    Explicit(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub family: Family,
    pub count: usize,
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Geometric { base } => write!(f, "geometric({base})"),
            Family::Polynomial { power } => write!(f, "polynomial({power})"),
            Family::GeometricWithPhases { base, phase_step } => {
                write!(f, "geometric_with_phases({base}, {phase_step})")
            }
            Family::Explicit(v) => write!(f, "explicit[{}]", v.len()),
        }?;
        write!(f, " x{}", self.count)
    }
}

fn check_base(base: f64) -> Result<()> {
    if base > 0.0 && base < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "base {base} must lie in (0, 1)"
        )))
    }
}

impl SequenceSpec {
    pub fn geometric(base: f64, count: usize) -> Self {
        Self {
            family: Family::Geometric { base },
            count,
        }
    }

    pub fn polynomial(power: f64, count: usize) -> Self {
        Self {
            family: Family::Polynomial { power },
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidSpec("count must be at least 1".into()));
        }
        match &self.family {
            Family::Geometric { base } => check_base(*base),
            Family::GeometricWithPhases { base, phase_step } => {
                check_base(*base)?;
                if phase_step.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec("phase step must be finite".into()))
                }
            }
            Family::Polynomial { power } => {
                if power.is_finite() && *power > 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!("power {power} must exceed 1")))
                }
            }
            Family::Explicit(values) => {
                if self.count <= values.len() {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "count {} exceeds the {} explicit points",
                        self.count,
                        values.len()
                    )))
                }
            }
        }
    }

    /// `1 − |λ_k|²` for the one-based index `k`, evaluated from the family
    /// formula rather than from the rounded point.
    fn one_minus_modulus_sq(&self, k: usize) -> f64 {
        match &self.family {
            Family::Geometric { base } | Family::GeometricWithPhases { base, .. } => {
                let t = base.powi(k as i32);
                t * (2.0 - t)
            }
            Family::Polynomial { power } => {
                let t = (k as f64).powf(-power);
                t * (2.0 - t)
            }
            Family::Explicit(values) => 1.0 - values[k - 1].norm_sqr(),
        }
    }

    fn value(&self, k: usize) -> Complex64 {
        match &self.family {
            Family::Geometric { base } => Complex64::new(1.0 - base.powi(k as i32), 0.0),
            Family::Polynomial { power } => Complex64::new(1.0 - (k as f64).powf(-power), 0.0),
            Family::GeometricWithPhases { base, phase_step } => {
                Complex64::from_polar(1.0 - base.powi(k as i32), phase_step * k as f64)
            }
            Family::Explicit(values) => values[k - 1],
        }
    }
}

/// Materialises the `count` points of a spec as a validated sequence.
pub fn generate(spec: &SequenceSpec) -> Result<DiscSequence> {
    spec.validate()?;
    let values: Vec<Complex64> = (1..=spec.count).map(|k| spec.value(k)).collect();
    DiscSequence::from_complex(&values, spec.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    /// `Σ_{k≤K} (1 − |λ_k|²)`.
    pub partial_sum: f64,
    /// Upper bound on `Σ_{k>K} (1 − |λ_k|²)`; zero for explicit lists.
    pub tail_bound: f64,
    pub admissible: bool,
}

/// Checks that the weights `√(1 − |λ_k|²)` are square-summable.
///
/// Tails use `1 − λ² ≤ 2(1 − λ)`: a geometric series for the geometric
/// families, integral comparison `∫_K^∞ x^(−p) dx` for the polynomial one.
pub fn admissibility_check(spec: &SequenceSpec, k: usize) -> Result<Admissibility> {
    spec.validate()?;
    let k = match &spec.family {
        Family::Explicit(values) => k.min(values.len()),
        _ => k,
    };
    let partial_sum: f64 = (1..=k).map(|i| spec.one_minus_modulus_sq(i)).sum();
    let tail_bound = match &spec.family {
        Family::Geometric { base } | Family::GeometricWithPhases { base, .. } => {
            2.0 * base.powi(k as i32 + 1) / (1.0 - base)
        }
        Family::Polynomial { power } => {
            if k == 0 {
                f64::INFINITY
            } else {
                2.0 * (k as f64).powf(1.0 - power) / (power - 1.0)
            }
        }
        Family::Explicit(_) => 0.0,
    };
    Ok(Admissibility {
        partial_sum,
        tail_bound,
        admissible: tail_bound.is_finite(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCondition {
    pub c_hat: f64,
    pub satisfied: bool,
    /// Zero-based `(k, l)` attaining the supremum (first on ties).
    pub argmax: (usize, usize),
}

fn ratio_result(c_hat: f64, argmax: (usize, usize)) -> RatioCondition {
    RatioCondition {
        c_hat,
        satisfied: c_hat < 1.0 - RATIO_EPS,
        argmax,
    }
}

/// `sup_{k,l} (1 − |λ_k γ_{l+1}|) / (1 − |λ_k γ_l|)` over every `k` of the
/// first sequence and every consecutive pair of the second.
pub fn ratio_condition_constant(
    seq_a: &DiscSequence,
    seq_b: &DiscSequence,
) -> Result<RatioCondition> {
    if seq_a.is_empty() {
        return Err(Error::SequenceTooShort {
            needed: 1,
            found: 0,
        });
    }
    if seq_b.len() < 2 {
        return Err(Error::SequenceTooShort {
            needed: 2,
            found: seq_b.len(),
        });
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax = (0, 0);
    for (k, a) in seq_a.points().iter().enumerate() {
        let ra = a.modulus();
        for l in 0..seq_b.len() - 1 {
            let num = 1.0 - ra * seq_b.points()[l + 1].modulus();
            let den = 1.0 - ra * seq_b.points()[l].modulus();
            let r = num / den;
            if r > best {
                best = r;
                argmax = (k, l);
            }
        }
    }
    Ok(ratio_result(best, argmax))
}

/// Consecutive ratios `(1 − |λ_{l+1}|) / (1 − |λ_l|)` of a single sequence.
pub fn single_factor_ratios(seq: &DiscSequence) -> Vec<f64> {
    seq.points()
        .windows(2)
        .map(|w| (1.0 - w[1].modulus()) / (1.0 - w[0].modulus()))
        .collect()
}

/// The ratio condition read on one factor: supremum of
/// [`single_factor_ratios`].
pub fn single_factor_ratio_constant(seq: &DiscSequence) -> Result<RatioCondition> {
    if seq.len() < 2 {
        return Err(Error::SequenceTooShort {
            needed: 2,
            found: seq.len(),
        });
    }
    let ratios = single_factor_ratios(seq);
    let mut best = 0;
    for (i, &r) in ratios.iter().enumerate() {
        if r > ratios[best] {
            best = i;
        }
    }
    Ok(ratio_result(ratios[best], (0, best)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductLowerBound {
    /// `∏_{N=1}^{n} ((1 − c^N)/(1 + c^N))²`.
    pub partial: f64,
    /// Lower bound on the product of all remaining factors.
    pub tail_factor_bound: f64,
    /// Rounding-safe lower bound on the infinite product.
    pub certified: f64,
}

/// Smallest `n` with `c^(n+1) ≤ 1/2`, so every tail factor has `x ≤ 1/2`.
pub fn min_terms_for_tail(c: f64) -> usize {
    let mut n = 1usize;
    while c.powi(n as i32 + 1) > 0.5 {
        n += 1;
    }
    n
}

/// Lower bound for `∏_{N≥1} ((1 − c^N)/(1 + c^N))²`, the separation floor for
/// sequences whose gaps to the boundary shrink at least geometrically.
///
/// Every tail factor has `x = c^N ≤ 1/2`, where `log(1 − x) ≥ −2x` and
/// `log(1 + x) ≤ x`, so `log factor ≥ −6x` and the tail is at least
/// `exp(−6 c^(n+1) / (1 − c))`.
pub fn theorem4_lower_bound(c: f64, n_terms: usize) -> Result<ProductLowerBound> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidC(c));
    }
    let needed = min_terms_for_tail(c);
    if n_terms < needed {
        return Err(Error::InsufficientTerms {
            n_terms,
            needed,
            tail_start: c.powi(n_terms as i32 + 1),
        });
    }
    let mut log_sum = 0.0;
    let mut x = 1.0;
    for _ in 0..n_terms {
        x *= c;
        log_sum += 2.0 * ((-x).ln_1p() - x.ln_1p());
    }
    let partial = log_sum.exp();
    let tail_factor_bound = (-6.0 * c.powi(n_terms as i32 + 1) / (1.0 - c)).exp();
    // generous allowance for the rounding of n_terms logs and one exp
    let slack = 1.0 - 64.0 * (n_terms as f64 + 4.0) * f64::EPSILON;
    Ok(ProductLowerBound {
        partial,
        tail_factor_bound,
        certified: partial * tail_factor_bound * slack,
    })
}
