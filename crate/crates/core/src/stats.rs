//! Small numeric helpers shared by the estimators.

/// Sample variance with the `n - 1` denominator.
///
/// Values are shifted by the first element before the two-pass sum, so a
/// constant input yields exactly zero.
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let shift = values[0];
    let mean = values.iter().map(|v| v - shift).sum::<f64>() / n as f64;
    values
        .iter()
        .map(|v| {
            let d = v - shift - mean;
            d * d
        })
        .sum::<f64>()
        / (n - 1) as f64
}

pub fn sample_sd(values: &[f64]) -> f64 {
    sample_variance(values).sqrt()
}

/// Sample variance of a multiset given as `values` with multiplicities
/// `counts`; the effective size is `sum(counts)`.
pub fn weighted_sample_variance(values: &[f64], counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total < 2.0 {
        return f64::NAN;
    }
    let Some(shift) = counts
        .iter()
        .zip(values)
        .find(|(&c, _)| c > 0.0)
        .map(|(_, &v)| v)
    else {
        return f64::NAN;
    };
    let mut s = 0.0;
    for (&c, &v) in counts.iter().zip(values) {
        s += c * (v - shift);
    }
    let mean = s / total;
    let mut ss = 0.0;
    for (&c, &v) in counts.iter().zip(values) {
        let d = v - shift - mean;
        ss += c * d * d;
    }
    ss / (total - 1.0)
}

/// Empirical quantile with linear interpolation between order statistics at
/// the (1-based) rank `1 + p (m - 1)`. `sorted` must be ascending and
/// non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let m = sorted.len();
    let pos = p * (m - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
