//! Exact-level credible sets for discrete posteriors.
//!
//! A membership function assigns each label an inclusion probability in
//! [0, 1] whose posterior expectation equals the requested credible mass
//! 1 - alpha exactly. The minimal-size solution is three-valued: 1 above a
//! mass threshold, 0 below it, and a shared weight gamma on the labels tied
//! with the threshold. Randomizing the tied labels with probability gamma
//! closes the gap that makes plain credible sets overshoot on discrete
//! parameters.

use crate::error::{Error, Result};
use crate::posterior::{tie_tol, CredibleLevel, DiscretePosterior};
use crate::rng;

/// Absolute slack when testing whether the cumulative mass has reached the
/// target at a jump of the survival function. Covers accumulated float
/// rounding in sums that are exact in real arithmetic; when it fires, the
/// tied group is taken fully (gamma = 1) rather than not at all.
const JUMP_EPS: f64 = 1e-12;

/// Gamma may land outside [0, 1] by at most this before it is treated as a
/// sign of inconsistent inputs rather than rounding.
const GAMMA_SLACK: f64 = 1e-12;

/// Tolerance for "the level is already met without a boundary".
const LEVEL_TOL: f64 = 1e-9;

/// Which of the three membership classes a label falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Mass strictly above the threshold; always included.
    Interior,
    /// Mass tied with the threshold; included with probability gamma.
    Boundary,
    /// Mass strictly below the threshold (or zero); never included.
    Exterior,
}

/// The fair three-valued membership function together with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Phi {
    alpha: f64,
    kappa: f64,
    gamma: f64,
    labels: Vec<String>,
    values: Vec<f64>,
    regions: Vec<Region>,
    mass: f64,
}

impl Phi {
    pub(crate) fn from_parts(
        alpha: f64,
        kappa: f64,
        gamma: f64,
        labels: Vec<String>,
        values: Vec<f64>,
        regions: Vec<Region>,
        mass: f64,
    ) -> Self {
        Self {
            alpha,
            kappa,
            gamma,
            labels,
            values,
            regions,
            mass,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The mass threshold separating interior from exterior.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The shared inclusion probability of the boundary labels.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Per-label membership values, each exactly 0, gamma, or 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn value(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.values[i])
    }

    pub fn region_labels(&self, region: Region) -> Vec<&str> {
        self.labels
            .iter()
            .zip(&self.regions)
            .filter(|(_, &r)| r == region)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn interior(&self) -> Vec<&str> {
        self.region_labels(Region::Interior)
    }

    pub fn boundary(&self) -> Vec<&str> {
        self.region_labels(Region::Boundary)
    }

    pub fn exterior(&self) -> Vec<&str> {
        self.region_labels(Region::Exterior)
    }

    /// The credible mass achieved at construction time.
    pub fn achieved_mass(&self) -> f64 {
        self.mass
    }

    /// Recomputes the credible mass against `post`: sum of value * prob.
    pub fn credible_mass(&self, post: &DiscretePosterior) -> Result<f64> {
        self.check_labels(post)?;
        Ok(self
            .values
            .iter()
            .zip(post.probs())
            .map(|(v, p)| v * p)
            .sum())
    }

    /// Counting-measure size: the plain sum of the membership values.
    pub fn size(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Posterior variance of the membership value, `E[phi^2] - E[phi]^2`.
    pub fn variance(&self, post: &DiscretePosterior) -> Result<f64> {
        self.check_labels(post)?;
        values_variance(&self.values, post)
    }

    /// Draws one realized label subset: each label enters independently with
    /// probability equal to its membership value. Deterministic in `seed`
    /// and keyed per label index, so the outcome does not depend on
    /// evaluation order.
    pub fn realize(&self, seed: u64) -> Vec<&str> {
        let mut included = Vec::new();
        for (i, (label, &v)) in self.labels.iter().zip(&self.values).enumerate() {
            let keep = if v >= 1.0 {
                true
            } else if v <= 0.0 {
                false
            } else {
                rng::uniform(seed, &[i as u64]) < v
            };
            if keep {
                included.push(label.as_str());
            }
        }
        included
    }

    fn check_labels(&self, post: &DiscretePosterior) -> Result<()> {
        if self.labels.len() != post.len()
            || self.labels.iter().zip(post.labels()).any(|(a, b)| a != b)
        {
            return Err(Error::LabelMismatch);
        }
        Ok(())
    }
}

/// Variance of an arbitrary membership assignment under the posterior.
///
/// Accepts any values in [0, 1], not only three-valued ones, so alternative
/// boundary assignments can be compared against the fair one.
pub fn values_variance(values: &[f64], post: &DiscretePosterior) -> Result<f64> {
    if values.len() != post.len() {
        return Err(Error::LabelMismatch);
    }
    let mean: f64 = values.iter().zip(post.probs()).map(|(v, p)| v * p).sum();
    let second: f64 = values
        .iter()
        .zip(post.probs())
        .map(|(v, p)| v * v * p)
        .sum();
    Ok(second - mean * mean)
}

/// The unique mass threshold for the requested level.
///
/// Returns the largest distinct positive mass value `v` whose closed
/// superlevel set carries at least the target mass 1 - alpha. When the
/// target lands exactly on a jump of the survival function, the larger of
/// the two admissible thresholds is returned, which makes the tied group
/// fully included downstream.
pub fn mass_threshold(post: &DiscretePosterior, level: CredibleLevel) -> f64 {
    let target = level.target_mass();
    let mut masses: Vec<f64> = post.probs().iter().copied().filter(|&m| m > 0.0).collect();
    masses.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite masses"));
    let mut prefix = Vec::with_capacity(masses.len() + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for &m in &masses {
        acc += m;
        prefix.push(acc);
    }

    let mut start = 0;
    while start < masses.len() {
        let anchor = masses[start];
        // end of the group tied with `anchor`
        let end = masses.partition_point(|&m| m - anchor >= -tie_tol(anchor));
        if prefix[end] >= target - JUMP_EPS {
            return anchor;
        }
        start = end;
    }
    // Unreachable for a normalized posterior (total mass 1 > target); be
    // defensive and let fair_gamma flag the inconsistency downstream.
    *masses.last().expect("posterior has positive mass")
}

/// The fair boundary weight for a given threshold.
///
/// With `b` the mass tied with `kappa` and `rho` the mass strictly above it,
/// gamma = (1 - alpha - rho) / b places the boundary's contribution so the
/// total credible mass is exactly 1 - alpha. With an empty boundary the
/// level must already be met by `rho` alone, and gamma is 0.
pub fn fair_gamma(post: &DiscretePosterior, level: CredibleLevel, kappa: f64) -> Result<f64> {
    let target = level.target_mass();
    let rho = post.mass_above(kappa);
    let boundary_mass = post.mass_at(kappa);
    if boundary_mass > 0.0 {
        let raw = (target - rho) / boundary_mass;
        // the upper slack is 1e-12 in mass units: a jump admitted by the
        // threshold scan may overshoot 1 by JUMP_EPS / boundary_mass
        let slack_hi = GAMMA_SLACK.max(JUMP_EPS / boundary_mass);
        if raw < -GAMMA_SLACK || raw > 1.0 + slack_hi {
            return Err(Error::GammaOutOfRange(raw));
        }
        Ok(raw.clamp(0.0, 1.0))
    } else if (target - rho).abs() <= LEVEL_TOL {
        Ok(0.0)
    } else {
        Err(Error::InconsistentKappa {
            kappa,
            rho,
            target,
        })
    }
}

/// The fair generalized highest-posterior-density credible set.
///
/// Labels with mass above the threshold get value 1, labels tied with it get
/// the shared gamma, everything else (including zero-mass labels) gets 0.
pub fn fair_ghpd(post: &DiscretePosterior, level: CredibleLevel) -> Result<Phi> {
    let kappa = mass_threshold(post, level);
    let gamma = fair_gamma(post, level, kappa)?;
    let tol = tie_tol(kappa);
    let mut values = Vec::with_capacity(post.len());
    let mut regions = Vec::with_capacity(post.len());
    let mut mass = 0.0;
    for &m in post.probs() {
        let (value, region) = if m <= 0.0 {
            (0.0, Region::Exterior)
        } else if m - kappa > tol {
            (1.0, Region::Interior)
        } else if (m - kappa).abs() <= tol {
            (gamma, Region::Boundary)
        } else {
            (0.0, Region::Exterior)
        };
        mass += value * m;
        values.push(value);
        regions.push(region);
    }
    debug_assert!(
        (mass - level.target_mass()).abs() <= 1e-9,
        "credible mass {mass} misses target {}",
        level.target_mass()
    );
    Ok(Phi::from_parts(
        level.alpha(),
        kappa,
        gamma,
        post.labels().to_vec(),
        values,
        regions,
        mass,
    ))
}

/// Minimal size any valid membership function can achieve, by fractional
/// greedy filling: take whole labels in decreasing mass order while they
/// fit under the target, then the exact fraction of the next one.
///
/// Kept deliberately independent of the threshold construction above; the
/// two must agree, and tests lean on that.
pub fn minimal_size_oracle(post: &DiscretePosterior, level: CredibleLevel) -> f64 {
    let target = level.target_mass();
    let mut order: Vec<usize> = (0..post.len()).collect();
    order.sort_by(|&a, &b| {
        post.prob(b)
            .partial_cmp(&post.prob(a))
            .expect("finite masses")
    });
    let mut covered = 0.0;
    let mut size = 0.0;
    for i in order {
        let m = post.prob(i);
        if m <= 0.0 {
            continue;
        }
        if covered + m <= target + JUMP_EPS {
            covered += m;
            size += 1.0;
        } else {
            size += ((target - covered) / m).max(0.0);
            return size;
        }
    }
    size
}
