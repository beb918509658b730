//! Statistical machinery: GLM fitting (logistic and negative-binomial),
//! sequential ANOVA, goodness-of-fit and rank tests, robust outlier
//! fences, and the train/validation split.
//!
//! 0/1 weights, tolerances and iteration caps are fixed constants
//! surfaced here rather than buried in the fitters.

mod anova;
mod design;
mod glm;
mod hypothesis;
mod linalg;
mod robust;
mod summary;

pub use anova::{anova_sequential, AnovaRow, AnovaTable};
pub use design::DesignMatrix;
pub use glm::{fit_logistic, fit_negbin, odds_ratios, Family, ModelFit, OddsRatioEntry, OddsRatioReport, TermFit};
pub use hypothesis::{chisq_goodness_of_fit, wilcoxon_mann_whitney, GoodnessOfFit, WmwTest};
pub use robust::{adjusted_boxplot_filter, medcouple, quantile_type7};
pub use summary::{coefficient_csv, model_table, significance_stars};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Relative deviance change below which IRLS is considered converged.
pub const IRLS_TOLERANCE: f64 = 1e-8;
/// Maximum IRLS iterations per fit.
pub const IRLS_MAX_ITERATIONS: usize = 50;
/// Maximum outer (beta, theta) alternations for the negative binomial.
pub const NEGBIN_MAX_OUTER_ITERATIONS: usize = 100;
/// Dispersion above which the negative binomial falls back to Poisson.
pub const THETA_DIVERGENCE_LIMIT: f64 = 1e6;

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("negative input to log transform: {0}")]
    NegativeLogInput(f64),
    #[error("column `{0}` already present in design matrix")]
    DuplicateColumn(String),
    #[error("column `{name}` has {len} rows, expected {expected}")]
    ColumnLength { name: String, len: usize, expected: usize },
    #[error("column `{0}` contains non-finite values")]
    NonFinite(String),
    #[error("unknown design column `{0}`")]
    UnknownColumn(String),
    #[error("singular design: column `{0}` is collinear with earlier columns")]
    SingularDesign(String),
    #[error("design has more columns ({cols}) than observations ({rows})")]
    TooFewObservations { rows: usize, cols: usize },
    #[error("binary outcome must contain both classes")]
    DegenerateOutcome,
    #[error("outcome must be 0 or 1, found {0}")]
    NotBinary(f64),
    #[error("counts must be nonnegative integers, found {0}")]
    NotACount(f64),
    #[error("count outcome is identically zero")]
    AllZeroCounts,
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("predicted cell {0} is not positive")]
    ZeroPredictedCell(usize),
    #[error("adjusted boxplot requires positive values, found {0}")]
    NonPositiveValue(f64),
    #[error("holdout {holdout} must be smaller than the item count {total}")]
    HoldoutTooLarge { holdout: usize, total: usize },
    #[error("odds ratios require a logistic fit, got {0}")]
    NotLogistic(String),
    #[error("fit did not converge: {0}")]
    NotConverged(String),
}

/// `ln(x + 1)`, the predictor transform used throughout (counts can be 0).
pub fn log_transform(x: f64) -> Result<f64, StatsError> {
    if x < 0.0 {
        return Err(StatsError::NegativeLogInput(x));
    }
    Ok(x.ln_1p())
}

/// Deterministic seeded split into (train, validation) of sizes
/// (n - holdout, holdout). The relative order of items is preserved
/// within each part.
pub fn split_train_validation<T: Clone>(
    items: &[T],
    holdout: usize,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>), StatsError> {
    if holdout > 0 && holdout >= items.len() {
        return Err(StatsError::HoldoutTooLarge { holdout, total: items.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..items.len()).collect();
    indices.shuffle(&mut rng);
    let mut validation_idx: Vec<usize> = indices[..holdout].to_vec();
    let mut train_idx: Vec<usize> = indices[holdout..].to_vec();
    validation_idx.sort_unstable();
    train_idx.sort_unstable();
    let train = train_idx.into_iter().map(|i| items[i].clone()).collect();
    let validation = validation_idx.into_iter().map(|i| items[i].clone()).collect();
    Ok((train, validation))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_transform_values() {
        assert_eq!(log_transform(0.0).unwrap(), 0.0);
        assert!((log_transform(std::f64::consts::E - 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((log_transform(100.0).unwrap() - 101f64.ln()).abs() < 1e-12);
        assert!((log_transform(100.0).unwrap() - 4.6151).abs() < 1e-4);
        assert!(log_transform(-0.5).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let items: Vec<u32> = (0..61).collect();
        let (train, validation) = split_train_validation(&items, 8, 17).unwrap();
        assert_eq!(train.len(), 53);
        assert_eq!(validation.len(), 8);
        // Disjoint and exhaustive.
        let mut all: Vec<u32> = train.iter().chain(validation.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, items);
        // Same seed, same split; different seed, (almost surely) different.
        let again = split_train_validation(&items, 8, 17).unwrap();
        assert_eq!(again.0, train);
        assert_eq!(again.1, validation);
        let other = split_train_validation(&items, 8, 18).unwrap();
        assert_ne!(other.1, validation);
    }

    #[test]
    fn split_edge_cases() {
        let items = vec![1, 2, 3];
        let (train, validation) = split_train_validation(&items, 0, 5).unwrap();
        assert_eq!(train, items);
        assert!(validation.is_empty());
        assert!(split_train_validation(&items, 3, 5).is_err());
        assert!(split_train_validation(&items, 4, 5).is_err());
    }
}
