//! Discrete posterior distributions over a finite, ordered label set.

use crate::error::{Error, Result};
use std::collections::HashSet;

/// Probability sums within this distance of 1 are renormalized silently;
/// anything further off is rejected when the caller claims normalized input.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Two masses count as tied at level `kappa` when they differ by at most this.
#[inline]
pub(crate) fn tie_tol(kappa: f64) -> f64 {
    1e-9 * kappa.max(1.0)
}

/// Credible level 1 - alpha, with alpha strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CredibleLevel {
    alpha: f64,
}

impl CredibleLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    /// The posterior mass the credible set must carry: 1 - alpha.
    pub fn target_mass(self) -> f64 {
        1.0 - self.alpha
    }
}

/// A normalized probability vector over distinct labels, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePosterior {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl DiscretePosterior {
    /// Builds a posterior from raw nonnegative weights, normalizing their sum to 1.
    pub fn from_weights<S: Into<String>>(labels: Vec<S>, weights: Vec<f64>) -> Result<Self> {
        Self::build(labels, weights, false)
    }

    /// Builds a posterior from probabilities the caller asserts are already
    /// normalized; sums off by more than [`NORMALIZATION_TOL`] are rejected,
    /// smaller drift is renormalized silently.
    pub fn from_probs<S: Into<String>>(labels: Vec<S>, probs: Vec<f64>) -> Result<Self> {
        Self::build(labels, probs, true)
    }

    fn build<S: Into<String>>(labels: Vec<S>, weights: Vec<f64>, normalized: bool) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput("posterior labels"));
        }
        if labels.len() != weights.len() {
            return Err(Error::LengthMismatch {
                labels: labels.len(),
                weights: weights.len(),
            });
        }
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        for (label, &w) in labels.iter().zip(&weights) {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight {
                    label: label.clone(),
                    value: w,
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::AllZeroWeights);
        }
        if normalized && (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let probs = weights.into_iter().map(|w| w / sum).collect();
        Ok(Self { labels, probs })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    /// Posterior mass strictly above `kappa` (ties excluded): the survival
    /// function of the mass values, right-continuous and nonincreasing.
    pub fn mass_above(&self, kappa: f64) -> f64 {
        let tol = tie_tol(kappa);
        self.probs.iter().filter(|&&m| m - kappa > tol).sum()
    }

    /// Posterior mass at or above `kappa` (left limit of [`Self::mass_above`]).
    pub fn mass_at_least(&self, kappa: f64) -> f64 {
        let tol = tie_tol(kappa);
        self.probs.iter().filter(|&&m| m - kappa >= -tol).sum()
    }

    /// Posterior mass tied with `kappa` under the tie tolerance.
    pub fn mass_at(&self, kappa: f64) -> f64 {
        let tol = tie_tol(kappa);
        self.probs.iter().filter(|&&m| (m - kappa).abs() <= tol).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_half() -> DiscretePosterior {
        DiscretePosterior::from_weights(
            vec!["0", "1", "2", "3", "4", "5"],
            vec![1.0, 5.0, 10.0, 10.0, 5.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn weights_normalize_preserving_order() {
        let p = DiscretePosterior::from_weights(vec!["a", "b", "c"], vec![5.0, 3.0, 2.0]).unwrap();
        assert_eq!(p.labels(), &["a", "b", "c"]);
        assert_eq!(p.probs(), &[0.5, 0.3, 0.2]);
    }

    #[test]
    fn symmetric_weights_give_half() {
        let p = DiscretePosterior::from_weights(vec!["a", "b"], vec![1.0, 1.0]).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn probs_pass_through() {
        let p = DiscretePosterior::from_probs(vec!["h", "t"], vec![0.9, 0.1]).unwrap();
        assert_eq!(p.probs(), &[0.9, 0.1]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            DiscretePosterior::from_weights(Vec::<&str>::new(), vec![]),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            DiscretePosterior::from_weights(vec!["a"], vec![-1.0]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            DiscretePosterior::from_weights(vec!["a", "b"], vec![0.0, 0.0]),
            Err(Error::AllZeroWeights)
        ));
        assert!(matches!(
            DiscretePosterior::from_weights(vec!["a", "a"], vec![1.0, 1.0]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            DiscretePosterior::from_probs(vec!["a", "b"], vec![0.7, 0.2]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            DiscretePosterior::from_weights(vec!["a", "b"], vec![1.0, f64::NAN]),
            Err(Error::InvalidWeight { .. })
        ));
    }

    #[test]
    fn small_drift_is_renormalized() {
        let p = DiscretePosterior::from_probs(vec!["a", "b"], vec![0.5, 0.5 + 1e-7]).unwrap();
        let sum: f64 = p.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mass_above_binomial_threshold() {
        // masses strictly above 1/32: (10 + 10 + 5 + 5)/32
        let p = binomial_half();
        assert_eq!(p.mass_above(0.03125), 0.9375);
    }

    #[test]
    fn mass_above_extremes() {
        let p = binomial_half();
        assert_eq!(p.mass_above(10.0 / 32.0), 0.0);
        let sum: f64 = p.mass_above(0.0);
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mass_at_counts_ties() {
        let p = binomial_half();
        assert_eq!(p.mass_at(1.0 / 32.0), 2.0 / 32.0);
        assert_eq!(p.mass_at(10.0 / 32.0), 20.0 / 32.0);
        assert_eq!(p.mass_at(0.5), 0.0);
    }

    #[test]
    fn mass_at_least_is_left_limit() {
        let p = binomial_half();
        assert_eq!(p.mass_at_least(1.0 / 32.0), 1.0);
        assert_eq!(p.mass_at_least(5.0 / 32.0), 30.0 / 32.0);
    }

    #[test]
    fn alpha_must_be_interior() {
        assert!(CredibleLevel::new(0.05).is_ok());
        assert!(CredibleLevel::new(0.0).is_err());
        assert!(CredibleLevel::new(1.0).is_err());
        assert!(CredibleLevel::new(-0.1).is_err());
        assert!(CredibleLevel::new(f64::NAN).is_err());
    }
}
