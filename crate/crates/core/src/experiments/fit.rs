use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest samples a log-log fit accepts.
pub const MIN_FIT_SAMPLES: usize = 4;
/// Default span, in decades of the abscissa, a log-log fit requires.
pub const DEFAULT_MIN_DECADES: f64 = 1.0;

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    /// Natural-log intercept.
    pub intercept: f64,
    pub r_squared: f64,
}

/// [`fit_loglog_span`] with a one-decade span requirement.
pub fn fit_loglog(samples: &[(f64, f64)]) -> Result<LogLogFit> {
    fit_loglog_span(samples, DEFAULT_MIN_DECADES)
}

/// Ordinary least squares on `(ln x, ln y)`; needs at least
/// [`MIN_FIT_SAMPLES`] positive samples whose abscissae span `min_decades`.
pub fn fit_loglog_span(samples: &[(f64, f64)], min_decades: f64) -> Result<LogLogFit> {
    let short = Error::InsufficientSpan { min_samples: MIN_FIT_SAMPLES, min_decades };
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(short);
    }
    if let Some(&(x, y)) = samples.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::NonPositiveSample { x, y });
    }
    let (lo, hi) = samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(x, _)| (lo.min(x), hi.max(x)));
    if (hi / lo).log10() < min_decades - 1e-12 {
        return Err(short);
    }
    let n = samples.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LogLogFit { slope, intercept, r_squared })
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Twelve points per decade, at least [`MIN_FIT_SAMPLES`].
pub fn default_sample_count(lo: f64, hi: f64) -> usize {
    ((12.0 * (hi / lo).log10()).round() as usize + 1).max(MIN_FIT_SAMPLES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_laws() {
        let xs = log_spaced(1.0, 100.0, 13);
        let f = fit_loglog(&xs.iter().map(|&x| (x, x * x)).collect::<Vec<_>>()).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        let f = fit_loglog(&xs.iter().map(|&x| (x, 5.0 / x)).collect::<Vec<_>>()).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12 && (f.intercept - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn wobbly_power_law() {
        let xs = log_spaced(1.0, 1e3, 37);
        let s: Vec<_> = xs.iter().map(|&x| (x, (1.0 + 0.01 * x.ln().sin()) / x)).collect();
        let f = fit_loglog(&s).unwrap();
        assert!((f.slope + 1.0).abs() <= 0.01 && f.r_squared >= 0.999);
    }

    #[test]
    fn rejects_short_or_invalid_input() {
        assert!(matches!(fit_loglog(&[(1.0, 1.0), (10.0, 2.0), (100.0, 3.0)]), Err(Error::InsufficientSpan { .. })));
        let narrow: Vec<_> = log_spaced(1.0, 5.0, 8).into_iter().map(|x| (x, x)).collect();
        assert!(matches!(fit_loglog(&narrow), Err(Error::InsufficientSpan { .. })));
        assert!(fit_loglog_span(&narrow, 0.5).is_ok());
        let bad = [(1.0, 1.0), (2.0, 0.0), (10.0, 1.0), (20.0, 1.0)];
        assert!(matches!(fit_loglog(&bad), Err(Error::NonPositiveSample { .. })));
    }

    #[test]
    fn spacing() {
        let xs = log_spaced(10.0, 100.0, default_sample_count(10.0, 100.0));
        assert_eq!(xs.len(), 13);
        assert_eq!((xs[0], xs[12]), (10.0, 100.0));
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    proptest! {
        #[test]
        fn recovers_slope_and_intercept(slope in -3.0f64..3.0, c in -5.0f64..5.0, lo in 0.01f64..10.0) {
            let s: Vec<_> = log_spaced(lo, lo * 100.0, 9).into_iter().map(|x| (x, c.exp() * x.powf(slope))).collect();
            let f = fit_loglog(&s).unwrap();
            prop_assert!((f.slope - slope).abs() < 1e-9);
            prop_assert!((f.intercept - c).abs() < 1e-8);
        }
    }
}
