use super::TrustError;

/// Least-squares line through rank-frequency data on log-log axes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PowerLawFit {
    /// Exponent of the fitted law `y = e^intercept · rank^slope`.
    pub slope: f64,
    pub intercept: f64,
    /// Absolute Pearson correlation of (ln rank, ln value).
    pub abs_r: f64,
    pub n_points: usize,
}

/// Fits a power law to positive samples treated as rank-frequency data.
///
/// Samples are sorted descending and paired with their 1-based rank. Non-positive
/// and non-finite samples are dropped before fitting.
pub fn fit_power_law(samples: &[f64]) -> Result<PowerLawFit, TrustError> {
    let mut ys: Vec<f64> = samples.iter().copied().filter(|y| y.is_finite() && *y > 0.0).collect();
    if ys.len() < 2 {
        return Err(TrustError::InsufficientData(ys.len()));
    }
    ys.sort_by(|a, b| b.total_cmp(a));
    if ys.first() == ys.last() {
        return Err(TrustError::DegenerateData);
    }

    let n = ys.len() as f64;
    let points: Vec<(f64, f64)> = ys
        .iter()
        .enumerate()
        .map(|(i, y)| (((i + 1) as f64).ln(), y.ln()))
        .collect();
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let slope = sxy / sxx;
    let abs_r = (sxy.abs() / (sxx * syy).sqrt()).min(1.0);
    Ok(PowerLawFit {
        slope,
        intercept: mean_y - slope * mean_x,
        abs_r,
        n_points: ys.len(),
    })
}
