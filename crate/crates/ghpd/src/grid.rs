//! One-dimensional gridded posteriors for continuous parameters.
//!
//! A density sampled at cell midpoints reduces the continuous problem to the
//! discrete one: each cell carries mass density * step. Away from flat spots
//! the boundary shrinks with the step and the membership function becomes
//! the indicator of the classical highest-density region; on a flat spot the
//! tied cells share one gamma, exactly as in the discrete case.

use crate::credible::{fair_ghpd, Phi, Region};
use crate::error::{Error, Result};
use crate::posterior::{CredibleLevel, DiscretePosterior};

/// A 1-D posterior density tabulated at cell midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    lo: f64,
    hi: f64,
    step: f64,
    density: Vec<f64>,
}

impl GridPosterior {
    /// Validates endpoints, step, cell count, and normalization
    /// (step * sum(density) must be 1 within 1e-6, then exact renormalization).
    pub fn new(lo: f64, hi: f64, step: f64, density: Vec<f64>) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidGrid("endpoints must be finite with lo < hi"));
        }
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidGrid("step must be positive"));
        }
        if density.len() < 2 {
            return Err(Error::DegenerateGrid(density.len()));
        }
        let expected = (hi - lo) / step;
        if (expected - density.len() as f64).abs() > 0.5 {
            return Err(Error::GridLengthMismatch {
                len: density.len(),
                expected,
            });
        }
        if density.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidGrid("density values must be finite and nonnegative"));
        }
        let integral: f64 = density.iter().sum::<f64>() * step;
        if (integral - 1.0).abs() > 1e-6 {
            return Err(Error::GridNotNormalized { integral });
        }
        let density = density.into_iter().map(|d| d / integral).collect();
        Ok(Self { lo, hi, step, density })
    }

    /// Tabulates `f` at the cell midpoints of a regular grid.
    pub fn from_fn(lo: f64, hi: f64, step: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidGrid("endpoints must be finite with lo < hi and step > 0"));
        }
        let cells = ((hi - lo) / step).round() as usize;
        let density = (0..cells)
            .map(|i| f(lo + (i as f64 + 0.5) * step))
            .collect();
        Self::new(lo, hi, step, density)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.step
    }

    pub fn cell_mass(&self, i: usize) -> f64 {
        self.density[i] * self.step
    }

    /// The discrete posterior over cells, labeled `c0..cN` in grid order.
    pub fn to_posterior(&self) -> DiscretePosterior {
        let labels: Vec<String> = (0..self.len()).map(|i| format!("c{i}")).collect();
        let masses: Vec<f64> = self.density.iter().map(|d| d * self.step).collect();
        DiscretePosterior::from_weights(labels, masses).expect("validated grid")
    }
}

/// The fair credible set over grid cells.
pub fn grid_ghpd(grid: &GridPosterior, level: CredibleLevel) -> Result<Phi> {
    fair_ghpd(&grid.to_posterior(), level)
}

/// The union of parameter intervals covered by interior cells, merged over
/// contiguous runs.
pub fn interior_intervals(grid: &GridPosterior, phi: &Phi) -> Vec<(f64, f64)> {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for (i, &region) in phi.regions().iter().enumerate() {
        if region != Region::Interior {
            continue;
        }
        let cell_lo = grid.lo + i as f64 * grid.step;
        let cell_hi = cell_lo + grid.step;
        match intervals.last_mut() {
            Some(last) if (last.1 - cell_lo).abs() < 1e-12 => last.1 = cell_hi,
            _ => intervals.push((cell_lo, cell_hi)),
        }
    }
    intervals
}

/// Total posterior mass sitting on boundary cells.
pub fn boundary_mass(grid: &GridPosterior, phi: &Phi) -> f64 {
    phi.regions()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r == Region::Boundary)
        .map(|(i, _)| grid.cell_mass(i))
        .sum()
}

/// Standard normal density.
pub fn standard_normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(alpha: f64) -> CredibleLevel {
        CredibleLevel::new(alpha).unwrap()
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(matches!(
            GridPosterior::new(0.0, 1.0, 1.0, vec![1.0]),
            Err(Error::DegenerateGrid(1))
        ));
        assert!(GridPosterior::new(0.0, 1.0, -0.5, vec![1.0, 1.0]).is_err());
        assert!(matches!(
            GridPosterior::new(0.0, 1.0, 0.5, vec![1.0, 1.0, 1.0, 1.0]),
            Err(Error::GridLengthMismatch { .. })
        ));
        assert!(matches!(
            GridPosterior::new(0.0, 1.0, 0.5, vec![5.0, 5.0]),
            Err(Error::GridNotNormalized { .. })
        ));
    }

    #[test]
    fn uniform_density_forces_constant_membership() {
        let grid = GridPosterior::new(0.0, 1.0, 0.01, vec![1.0; 100]).unwrap();
        for alpha in [0.05, 0.25, 0.5] {
            let phi = grid_ghpd(&grid, level(alpha)).unwrap();
            assert!(phi
                .values()
                .iter()
                .all(|&v| (v - (1.0 - alpha)).abs() < 1e-12));
            assert!(phi.interior().is_empty());
            assert_eq!(phi.boundary().len(), 100);
        }
    }

    #[test]
    fn standard_normal_interval_matches_quantile() {
        let grid = GridPosterior::from_fn(-6.0, 6.0, 1e-3, standard_normal_density).unwrap();
        let phi = grid_ghpd(&grid, level(0.05)).unwrap();
        let intervals = interior_intervals(&grid, &phi);
        assert_eq!(intervals.len(), 1, "interior must be one interval");
        let (a, b) = intervals[0];
        assert!((a + 1.959964).abs() <= 2e-3, "left endpoint {a}");
        assert!((b - 1.959964).abs() <= 2e-3, "right endpoint {b}");
        assert!(boundary_mass(&grid, &phi) < 1e-2);
    }

    #[test]
    fn trapezoid_plateau_shares_one_gamma() {
        // Flat top of height h over [-1, 1], linear shoulders down to 0 at
        // +-2; h = 1/3 normalizes it. Pick alpha so the target falls strictly
        // inside the plateau's mass range: plateau mass = 2h = 2/3.
        let h = 1.0 / 3.0;
        let f = |x: f64| {
            let a = x.abs();
            if a <= 1.0 {
                h
            } else if a < 2.0 {
                h * (2.0 - a)
            } else {
                0.0
            }
        };
        let step = 0.01;
        let grid = GridPosterior::from_fn(-2.0, 2.0, step, f).unwrap();
        let alpha = 0.6; // target 0.4 < plateau mass 2/3
        let phi = grid_ghpd(&grid, level(alpha)).unwrap();
        let post = grid.to_posterior();
        // Closed form on the tied group: gamma = (target - rho) / mass_at
        let kappa = phi.kappa();
        let expected = (0.4 - post.mass_above(kappa)) / post.mass_at(kappa);
        assert!((phi.gamma() - expected).abs() < 1e-12);
        assert!(phi.gamma() > 0.0 && phi.gamma() < 1.0);
        // the plateau cells all sit on the boundary
        let plateau_cells = (1.0 / step * 2.0).round() as usize;
        assert_eq!(phi.boundary().len(), plateau_cells);
        assert!((phi.credible_mass(&post).unwrap() - 0.4).abs() < 1e-9);
    }

    #[test]
    fn halving_the_step_shrinks_the_boundary() {
        let coarse = GridPosterior::from_fn(-6.0, 6.0, 2e-3, standard_normal_density).unwrap();
        let fine = GridPosterior::from_fn(-6.0, 6.0, 1e-3, standard_normal_density).unwrap();
        let phi_c = grid_ghpd(&coarse, level(0.05)).unwrap();
        let phi_f = grid_ghpd(&fine, level(0.05)).unwrap();
        let bm_c = boundary_mass(&coarse, &phi_c);
        let bm_f = boundary_mass(&fine, &phi_f);
        assert!(bm_f <= 0.5 * bm_c, "coarse {bm_c} fine {bm_f}");
    }

    #[test]
    fn midpoints_and_masses() {
        let grid = GridPosterior::new(0.0, 1.0, 0.25, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((grid.midpoint(0) - 0.125).abs() < 1e-15);
        assert!((grid.cell_mass(2) - 0.25).abs() < 1e-15);
        let post = grid.to_posterior();
        assert_eq!(post.labels()[3], "c3");
    }
}
