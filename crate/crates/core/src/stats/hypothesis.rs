//! Pearson chi-square goodness of fit and the Wilcoxon-Mann-Whitney
//! rank-sum test.

use super::StatsError;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

pub(crate) fn chi_square_upper_tail(statistic: f64, df: f64) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df).expect("positive degrees of freedom");
    (1.0 - dist.cdf(statistic)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson X^2 = sum((actual - predicted)^2 / predicted) against the
/// chi-square distribution with n-1 degrees of freedom. A high p-value
/// means no evidence that observed counts deviate from the predictions.
pub fn chisq_goodness_of_fit(
    predicted: &[f64],
    actual: &[f64],
) -> Result<GoodnessOfFit, StatsError> {
    if predicted.len() != actual.len() {
        return Err(StatsError::LengthMismatch(predicted.len(), actual.len()));
    }
    if predicted.len() < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: predicted.len() });
    }
    let mut statistic = 0.0;
    for (i, (&p, &a)) in predicted.iter().zip(actual).enumerate() {
        if p <= 0.0 {
            return Err(StatsError::ZeroPredictedCell(i));
        }
        statistic += (a - p).powi(2) / p;
    }
    let df = predicted.len() - 1;
    Ok(GoodnessOfFit { statistic, df, p_value: chi_square_upper_tail(statistic, df as f64) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WmwTest {
    /// U statistic of the first sample.
    pub u: f64,
    pub p_value: f64,
}

/// Two-sided Wilcoxon-Mann-Whitney test with midrank tie handling.
///
/// The p-value uses the normal approximation with tie-corrected variance
/// and a continuity correction. A pooled sample with no variation at
/// all degenerates to p = 1.
pub fn wilcoxon_mann_whitney(a: &[f64], b: &[f64]) -> Result<WmwTest, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::TooFewValues { needed: 1, got: 0 });
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let n = na + nb;

    // Midranks over the pooled sample.
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .map(|&v| (v, 0usize))
        .chain(b.iter().map(|&v| (v, 1usize)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite samples"));
    let mut rank_sum_a = 0.0;
    let mut tie_correction = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let ties = (j - i) as f64;
        let midrank = (i + 1 + j) as f64 / 2.0; // average of ranks i+1 ..= j
        for item in &pooled[i..j] {
            if item.1 == 0 {
                rank_sum_a += midrank;
            }
        }
        tie_correction += ties.powi(3) - ties;
        i = j;
    }

    let u = rank_sum_a - na * (na + 1.0) / 2.0;
    let mean = na * nb / 2.0;
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_correction / (n * (n - 1.0)));
    if variance <= 0.0 {
        return Ok(WmwTest { u, p_value: 1.0 });
    }
    let diff = u - mean;
    let z = (diff.abs() - 0.5).max(0.0) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = (2.0 * (1.0 - normal.cdf(z))).clamp(0.0, 1.0);
    Ok(WmwTest { u, p_value: p })
}
