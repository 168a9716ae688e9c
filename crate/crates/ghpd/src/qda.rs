//! Gaussian class-conditional models (quadratic discriminant analysis).
//!
//! Each class gets its own mean, covariance, and prior; posteriors over the
//! class labels come from Bayes' rule on the Gaussian log-densities and feed
//! straight into the credible-set machinery.

use crate::credible::{fair_ghpd, Phi};
use crate::error::{Error, Result};
use crate::posterior::{CredibleLevel, DiscretePosterior};
use nalgebra::{DMatrix, DVector};

const LN_TAU: f64 = 1.837877066409345483560659472811; // ln(2*pi)

/// Rows of features with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl LabeledDataset {
    pub fn new<S: Into<String>>(features: Vec<Vec<f64>>, labels: Vec<S>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyInput("dataset rows"));
        }
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch {
                labels: labels.len(),
                weights: features.len(),
            });
        }
        let dim = features[0].len();
        if dim == 0 {
            return Err(Error::EmptyInput("feature columns"));
        }
        for (row, x) in features.iter().enumerate() {
            if x.len() != dim {
                return Err(Error::RaggedRow {
                    row,
                    got: x.len(),
                    expected: dim,
                });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature { row });
            }
        }
        Ok(Self {
            features,
            labels: labels.into_iter().map(Into::into).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.features.len()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Distinct class labels in order of first appearance.
    pub fn class_labels(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for label in &self.labels {
            if !seen.contains(&label.as_str()) {
                seen.push(label.as_str());
            }
        }
        seen
    }
}

/// One fitted class: moments, prior, and the cached Cholesky factor.
#[derive(Debug, Clone)]
pub struct ClassModel {
    label: String,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    prior: f64,
    chol_l: DMatrix<f64>,
    log_det: f64,
}

impl ClassModel {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }
}

/// The full set of fitted classes, in dataset first-appearance order.
#[derive(Debug, Clone)]
pub struct QdaModel {
    classes: Vec<ClassModel>,
    dim: usize,
}

/// Factors a covariance, jittering the diagonal once by 1e-8 * trace/d when
/// the plain factorization fails. Returns the lower factor and log |Sigma|.
fn cholesky_with_jitter(cov: &DMatrix<f64>, label: &str) -> Result<(DMatrix<f64>, f64)> {
    let factor = nalgebra::Cholesky::new(cov.clone()).or_else(|| {
        let d = cov.nrows() as f64;
        let jitter = 1e-8 * cov.trace() / d;
        let mut bumped = cov.clone();
        for i in 0..cov.nrows() {
            bumped[(i, i)] += jitter;
        }
        nalgebra::Cholesky::new(bumped)
    });
    match factor {
        Some(c) => {
            let l = c.l();
            let log_det = 2.0 * (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>();
            Ok((l, log_det))
        }
        None => Err(Error::CovarianceNotPositiveDefinite(label.to_string())),
    }
}

/// Fits per-class means, covariances (n_c - 1 denominator), and empirical
/// priors. Every class must supply at least d + 1 rows.
pub fn fit_qda(data: &LabeledDataset) -> Result<QdaModel> {
    fit_qda_impl(data, None)
}

/// Same as [`fit_qda`] but with caller-supplied priors, one per class label,
/// summing to 1 within 1e-9.
pub fn fit_qda_with_priors(data: &LabeledDataset, priors: &[(String, f64)]) -> Result<QdaModel> {
    fit_qda_impl(data, Some(priors))
}

fn fit_qda_impl(data: &LabeledDataset, priors: Option<&[(String, f64)]>) -> Result<QdaModel> {
    let d = data.dim();
    let class_labels = data.class_labels();
    if class_labels.len() < 2 {
        return Err(Error::TooFewClasses(class_labels.len()));
    }

    let prior_for = |label: &str, frequency: f64| -> Result<f64> {
        match priors {
            None => Ok(frequency),
            Some(list) => list
                .iter()
                .find(|(l, _)| l == label)
                .map(|(_, p)| *p)
                .ok_or_else(|| Error::InvalidPriors(format!("no prior for class {label:?}"))),
        }
    };
    if let Some(list) = priors {
        let sum: f64 = list.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPriors(format!("priors sum to {sum}")));
        }
        if list.iter().any(|(_, p)| *p <= 0.0 || !p.is_finite()) {
            return Err(Error::InvalidPriors("priors must be positive".into()));
        }
        for (l, _) in list {
            if !class_labels.contains(&l.as_str()) {
                return Err(Error::InvalidPriors(format!("unknown class {l:?}")));
            }
        }
    }

    let mut classes = Vec::with_capacity(class_labels.len());
    for class in &class_labels {
        let rows: Vec<&[f64]> = (0..data.n())
            .filter(|&i| data.label(i) == *class)
            .map(|i| data.row(i))
            .collect();
        let n_c = rows.len();
        if n_c < d + 1 {
            return Err(Error::ClassTooSmall {
                label: class.to_string(),
                count: n_c,
                needed: d + 1,
            });
        }
        let mut mean = DVector::zeros(d);
        for row in &rows {
            mean += DVector::from_column_slice(row);
        }
        mean /= n_c as f64;
        let mut cov = DMatrix::zeros(d, d);
        for row in &rows {
            let centered = DVector::from_column_slice(row) - &mean;
            cov += &centered * centered.transpose();
        }
        cov /= (n_c - 1) as f64;
        let (chol_l, log_det) = cholesky_with_jitter(&cov, class)?;
        classes.push(ClassModel {
            label: class.to_string(),
            mean,
            cov,
            prior: prior_for(class, n_c as f64 / data.n() as f64)?,
            chol_l,
            log_det,
        });
    }
    Ok(QdaModel { classes, dim: d })
}

impl QdaModel {
    /// Rebuilds a model from stored moments (used when loading persisted
    /// models); priors must sum to 1 within 1e-12.
    pub fn from_parts(
        classes: Vec<(String, Vec<f64>, DMatrix<f64>, f64)>,
    ) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::TooFewClasses(classes.len()));
        }
        let dim = classes[0].1.len();
        let prior_sum: f64 = classes.iter().map(|(_, _, _, p)| p).sum();
        if (prior_sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPriors(format!("priors sum to {prior_sum}")));
        }
        let mut built = Vec::with_capacity(classes.len());
        for (label, mean, cov, prior) in classes {
            if mean.len() != dim || cov.nrows() != dim || cov.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: mean.len(),
                });
            }
            if prior <= 0.0 || !prior.is_finite() {
                return Err(Error::InvalidPriors(format!(
                    "prior for {label:?} must be positive"
                )));
            }
            let (chol_l, log_det) = cholesky_with_jitter(&cov, &label)?;
            built.push(ClassModel {
                label,
                mean: DVector::from_vec(mean),
                cov,
                prior,
                chol_l,
                log_det,
            });
        }
        Ok(Self {
            classes: built,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> &[ClassModel] {
        &self.classes
    }

    pub fn class_labels(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.label.as_str()).collect()
    }

    /// Gaussian log-density of `x` under one class.
    pub fn log_density(&self, class_index: usize, x: &[f64]) -> f64 {
        let class = &self.classes[class_index];
        let centered = DVector::from_column_slice(x) - &class.mean;
        let z = class
            .chol_l
            .solve_lower_triangular(&centered)
            .expect("cholesky factor is invertible");
        let quad = z.norm_squared();
        -0.5 * (self.dim as f64 * LN_TAU + class.log_det + quad)
    }

    /// Posterior over class labels at `x`, via log-densities with
    /// max-subtraction before exponentiating.
    pub fn posterior_at(&self, x: &[f64]) -> Result<DiscretePosterior> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let log_weights: Vec<f64> = (0..self.classes.len())
            .map(|c| self.classes[c].prior.ln() + self.log_density(c, x))
            .collect();
        let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
        DiscretePosterior::from_weights(
            self.classes.iter().map(|c| c.label.clone()).collect(),
            weights,
        )
    }

    /// Quadratic discriminant scores log prior - (log|Sigma| + quad form)/2;
    /// same argmax as the posterior, kept as an independent formulation.
    pub fn discriminant_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok((0..self.classes.len())
            .map(|c| {
                let class = &self.classes[c];
                let centered = DVector::from_column_slice(x) - &class.mean;
                let z = class
                    .chol_l
                    .solve_lower_triangular(&centered)
                    .expect("cholesky factor is invertible");
                class.prior.ln() - 0.5 * (class.log_det + z.norm_squared())
            })
            .collect())
    }

    /// The class with the largest posterior; ties go to the earlier class in
    /// input order.
    pub fn predict(&self, x: &[f64]) -> Result<&str> {
        let post = self.posterior_at(x)?;
        let mut best = 0;
        for i in 1..post.len() {
            if post.prob(i) > post.prob(best) {
                best = i;
            }
        }
        Ok(&self.classes[best].label)
    }

    /// Prediction plus the fair credible set over class labels.
    pub fn classify_with_uncertainty(
        &self,
        x: &[f64],
        level: CredibleLevel,
    ) -> Result<(String, Phi)> {
        let post = self.posterior_at(x)?;
        let phi = fair_ghpd(&post, level)?;
        let label = self.predict(x)?.to_string();
        Ok((label, phi))
    }
}
