//! High-SNR slope of outage curves on log-log axes.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok(sxy / sxx)
}

/// Diversity order: slope of `-log10(out)` against `log10(P)` over the points
/// whose power (in dB) lies in the closed `window`.
///
/// At least three points are required, each with a positive probability.
pub fn estimate_diversity(curve: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let used: Vec<(f64, f64)> =
        curve.iter().copied().filter(|(p_db, _)| *p_db >= window.0 && *p_db <= window.1).collect();
    if used.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: used.len() });
    }
    if let Some(&(p_db, value)) = used.iter().find(|(_, out)| !(*out > 0.0)) {
        return Err(Error::NonPositiveProbability { p_db, value });
    }
    let xs: Vec<f64> = used.iter().map(|(p_db, _)| p_db / 10.0).collect();
    let ys: Vec<f64> = used.iter().map(|(_, out)| -libm::log10(*out)).collect();
    least_squares_slope(&xs, &ys)
}

/// Top 10 dB of the sweep, widened downward until it holds four points.
pub fn default_window(p_db: &[f64]) -> Option<(f64, f64)> {
    let mut sorted: Vec<f64> = p_db.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top = *sorted.first()?;
    let in_top = sorted.iter().filter(|&&p| p >= top - 10.0).count();
    let lo = sorted[in_top.max(4).min(sorted.len()) - 1];
    Some((lo, top))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        for &d in &[0.5, 1.0, 2.0] {
            let curve: Vec<(f64, f64)> = (0..=30)
                .step_by(2)
                .map(|p_db| {
                    let p = libm::pow(10.0, p_db as f64 / 10.0);
                    (p_db as f64, 0.3 / libm::pow(p, d))
                })
                .collect();
            let slope = estimate_diversity(&curve, (20.0, 30.0)).unwrap();
            assert!((slope - d).abs() < 1e-6, "{slope} vs {d}");
        }
    }

    #[test]
    fn rejects_sparse_or_empty_points() {
        let curve = [(20.0, 1e-2), (25.0, 3e-3), (30.0, 0.0)];
        assert!(matches!(
            estimate_diversity(&curve, (20.0, 30.0)),
            Err(Error::NonPositiveProbability { .. })
        ));
        assert!(matches!(
            estimate_diversity(&curve[..2], (20.0, 30.0)),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn window_defaults() {
        let sweep: Vec<f64> = (0..=30).step_by(5).map(|p| p as f64).collect();
        assert_eq!(default_window(&sweep), Some((15.0, 30.0)));
        let fine: Vec<f64> = (0..=30).step_by(2).map(|p| p as f64).collect();
        assert_eq!(default_window(&fine), Some((20.0, 30.0)));
        assert_eq!(default_window(&[]), None);
    }
}
