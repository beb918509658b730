//! Robust skewness (medcouple) and the Hubert-Vandervieren adjusted
//! boxplot fence used to drop extreme test-maintenance outliers.

use super::StatsError;

/// Linear-interpolation (type-7) quantile of an ascending-sorted slice.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Medcouple: the median of the kernel
/// `h(xi, xj) = ((xj - m) - (m - xi)) / (xj - xi)` over all pairs with
/// `xi <= m <= xj`, `xi != xj`, where `m` is the sample median. Pairs of
/// observations tied at the median use the standard sign kernel so that
/// symmetric samples stay at exactly zero.
///
/// This is the O(n^2) kernel enumeration; the samples this pipeline
/// filters are small enough that the fast algorithm is not worth its
/// complexity.
pub fn medcouple(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 3 {
        return Err(StatsError::TooFewValues { needed: 3, got: values.len() });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let m = median_sorted(&sorted);

    let lower: Vec<f64> = sorted.iter().copied().filter(|&v| v <= m).collect();
    let upper: Vec<f64> = sorted.iter().copied().filter(|&v| v >= m).collect();
    let ties = sorted.iter().filter(|&&v| v == m).count();
    let lower_tie_start = lower.len() - ties; // ties sit at the end of `lower`

    let mut kernels = Vec::with_capacity(lower.len() * upper.len());
    for (i, &xu) in upper.iter().enumerate() {
        for (j, &xl) in lower.iter().enumerate() {
            let h = if xu == m && xl == m {
                // Tie kernel: sign(p + q - 1 - k) with 1-based positions
                // inside the tied block on each side. Integer signum;
                // f64::signum would map the zero case to 1.
                let p = (i + 1) as i64;
                let q = (j - lower_tie_start + 1) as i64;
                (p + q - 1 - ties as i64).signum() as f64
            } else {
                ((xu - m) - (m - xl)) / (xu - xl)
            };
            kernels.push(h);
        }
    }
    kernels.sort_by(|a, b| a.partial_cmp(b).expect("kernels are finite"));
    Ok(median_sorted(&kernels))
}

/// Keep-mask for the adjusted-boxplot upper fence on a positive sample:
/// `Q3 + 1.5 * exp(3 MC) * IQR` when the medcouple is nonnegative,
/// `Q3 + 1.5 * exp(4 MC) * IQR` otherwise. Only the upper fence applies;
/// the filter exists to drop extreme-high activity. With MC = 0 the
/// fence reduces to Tukey's classic Q3 + 1.5 IQR.
pub fn adjusted_boxplot_filter(values: &[f64]) -> Result<Vec<bool>, StatsError> {
    for &v in values {
        if v <= 0.0 {
            return Err(StatsError::NonPositiveValue(v));
        }
    }
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let q3 = quantile_type7(&sorted, 0.75);
    let iqr = q3 - quantile_type7(&sorted, 0.25);
    // Fewer than three points cannot witness skew; the Tukey fence
    // already keeps everything there.
    let mc = if values.len() >= 3 { medcouple(values)? } else { 0.0 };
    let factor = if mc >= 0.0 { (3.0 * mc).exp() } else { (4.0 * mc).exp() };
    let fence = q3 + 1.5 * factor * iqr;
    Ok(values.iter().map(|&v| v <= fence).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate_linearly() {
        let xs = [1.0, 2.0, 3.0, 10.0];
        assert_eq!(quantile_type7(&xs, 0.0), 1.0);
        assert_eq!(quantile_type7(&xs, 1.0), 10.0);
        assert_eq!(quantile_type7(&xs, 0.5), 2.5);
        assert_eq!(quantile_type7(&xs, 0.25), 1.75);
        assert_eq!(quantile_type7(&xs, 0.75), 4.75);
    }

    #[test]
    fn medcouple_of_symmetric_samples_is_zero() {
        assert_eq!(medcouple(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 0.0);
        assert_eq!(medcouple(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(medcouple(&[1.0, 2.0, 2.0, 3.0]).unwrap(), 0.0);
        // Heavy ties at the median.
        assert_eq!(medcouple(&[1.0, 2.0, 2.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn medcouple_matches_hand_enumeration() {
        // {1,2,3,10}: m=2.5, kernels {-0.5, 2/3, 0, 0.875} -> median 1/3.
        let mc = medcouple(&[1.0, 2.0, 3.0, 10.0]).unwrap();
        assert!((mc - 1.0 / 3.0).abs() < 1e-12, "mc = {mc}");
    }

    #[test]
    fn medcouple_rejects_tiny_samples() {
        assert!(medcouple(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn fence_reduces_to_tukey_for_symmetric_data() {
        // Symmetric positive sample: MC = 0, fence = Q3 + 1.5 IQR.
        let values = [1.0, 2.0, 3.0, 4.0, 5.0];
        let mask = adjusted_boxplot_filter(&values).unwrap();
        assert_eq!(mask, vec![true; 5]);
    }

    #[test]
    fn extreme_value_is_dropped() {
        let mut values = vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 5.0, 6.0, 8.0];
        values.push(4.75 * 50.0); // far beyond any plausible fence
        let mask = adjusted_boxplot_filter(&values).unwrap();
        assert!(mask[..10].iter().all(|&k| k));
        assert!(!mask[10]);
    }

    #[test]
    fn all_equal_positive_sample_keeps_everything() {
        let values = [7.0; 6];
        let mask = adjusted_boxplot_filter(&values).unwrap();
        assert!(mask.iter().all(|&k| k));
    }

    #[test]
    fn nonpositive_values_are_rejected() {
        assert!(matches!(
            adjusted_boxplot_filter(&[1.0, 0.0]),
            Err(StatsError::NonPositiveValue(_))
        ));
        assert!(adjusted_boxplot_filter(&[1.0, -2.0]).is_err());
    }
}
