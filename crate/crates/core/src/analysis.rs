//! Error and rate estimates used by convergence and drift studies.

use crate::error::{Error, Result};

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), found: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::Config("a slope needs at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::Config("abscissae must not all coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Observed order from errors `e` at step sizes `h`: the slope of
/// `log e` against `log h`.
pub fn observed_order(h: &[f64], e: &[f64]) -> Result<f64> {
    if h.iter().chain(e).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::Config("step sizes and errors must be positive".into()));
    }
    let lh: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let le: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    least_squares_slope(&lh, &le)
}

/// Pairwise orders `log(e_{i-1}/e_i) / log(h_{i-1}/h_i)`; the first entry is
/// `None`.
pub fn pairwise_orders(h: &[f64], e: &[f64]) -> Vec<Option<f64>> {
    (0..h.len()).map(|i| (i > 0).then(|| (e[i - 1] / e[i]).ln() / (h[i - 1] / h[i]).ln())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        assert!((least_squares_slope(&[0., 1., 2., 3.], &[1., 3., 5., 7.]).unwrap() - 2.0).abs() < 1e-15);
        assert!(least_squares_slope(&[1.0], &[1.0]).is_err());
        assert!(least_squares_slope(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn order_of_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h * h * h).collect();
        assert!((observed_order(&h, &e).unwrap() - 3.0).abs() < 1e-12);
        let p = pairwise_orders(&h, &e);
        assert!(p[0].is_none() && (p[2].unwrap() - 3.0).abs() < 1e-12);
        assert!(observed_order(&h, &[1.0, 0.0, 1.0]).is_err());
    }
}
