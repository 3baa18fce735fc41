//! Least-squares power-law fitting in log-log coordinates.

/// Result of fitting ln(value) = slope · ln(eps) + intercept.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual in natural-log space.
    pub residual: f64,
}

/// Fit a power law to (eps, value) pairs. Pairs with non-positive values are
/// skipped (the caller is expected to flag them); returns `None` when fewer
/// than two usable pairs remain.
pub fn log_log_fit(pairs: &[(f64, f64)]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(e, v)| *e > 0.0 && *v > 0.0)
        .map(|&(e, v)| (e.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = pts
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Some(LogLogFit { slope, intercept, residual: (ss / n).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law_recovered() {
        let pairs: Vec<(f64, f64)> = (0..6)
            .map(|j| {
                let e = 0.5 * 0.7f64.powi(j);
                (e, 3.0 * e.powf(-2.5))
            })
            .collect();
        let fit = log_log_fit(&pairs).unwrap();
        assert_relative_eq!(fit.slope, -2.5, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept, 3.0f64.ln(), max_relative = 1e-10);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn degenerate_inputs_yield_none() {
        assert!(log_log_fit(&[(0.5, 1.0)]).is_none());
        assert!(log_log_fit(&[(0.5, -1.0), (0.25, 0.0)]).is_none());
        // identical abscissae
        assert!(log_log_fit(&[(0.5, 1.0), (0.5, 2.0)]).is_none());
    }
}
