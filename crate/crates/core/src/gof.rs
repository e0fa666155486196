//! Goodness-of-fit statistics for validating sampler output.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Result};

/// Pearson's statistic Σ (O − E)² / E with E = n·probs[i].
pub fn chi_square_statistic(observed: &[u64], probs: &[f64]) -> Result<f64> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(invalid("observed counts and probabilities must have the same nonzero length"));
    }
    if probs.iter().any(|&p| !(p > 0.0)) {
        return Err(invalid("every chi-square bin needs positive probability"));
    }
    let n: u64 = observed.iter().sum();
    let n = n as f64;
    Ok(observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum())
}

/// Upper `alpha` quantile of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_critical(dof: usize, alpha: f64) -> Result<f64> {
    let law = ChiSquared::new(dof as f64).map_err(|e| invalid(e.to_string()))?;
    Ok(law.inverse_cdf(1.0 - alpha))
}

/// sup |F_n − F| of the empirical law of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("KS statistic needs at least one sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max))
}

/// Asymptotic KS critical value sqrt(−ln(alpha/2) / 2) / √n.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_of_exact_counts_is_zero() {
        assert_eq!(chi_square_statistic(&[25, 25, 50], &[0.25, 0.25, 0.5]).unwrap(), 0.0);
        assert!(chi_square_statistic(&[1, 2], &[1.0]).is_err());
    }

    #[test]
    fn critical_values() {
        // Tabulated 0.999 quantile of chi-square with 12 degrees of freedom.
        assert!((chi_square_critical(12, 1e-3).unwrap() - 32.909).abs() < 1e-3);
        // Classical large-sample 0.1% KS coefficient 1.9495.
        assert!((ks_critical(1, 1e-3) - 1.9495).abs() < 1e-3);
    }

    #[test]
    fn ks_of_uniform_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_statistic(&xs, |x| x).unwrap() - 0.005).abs() < 1e-12);
    }
}
