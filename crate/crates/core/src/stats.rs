//! Goodness-of-fit helpers for Monte Carlo checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Linear-interpolated quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    quantile_sorted(&s, 0.5)
}

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Standard error of a Bernoulli frequency.
pub fn binomial_stderr(freq: f64, trials: usize) -> f64 {
    (freq * (1.0 - freq) / trials as f64).sqrt()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous cdf.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov–Smirnov distance between integer samples and a distribution on
/// the integers given by its cdf. Both step functions jump only at integers,
/// so the supremum is attained on them.
pub fn ks_statistic_discrete(samples: &[u64], cdf: impl Fn(u64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_unstable();
    let n = s.len() as f64;
    let (lo, hi) = (s[0], s[s.len() - 1]);
    let mut d: f64 = if lo > 0 { cdf(lo - 1) } else { 0.0 };
    let mut seen = 0usize;
    for k in lo..=hi {
        while seen < s.len() && s[seen] <= k {
            seen += 1;
        }
        d = d.max((seen as f64 / n - cdf(k)).abs());
    }
    d
}

/// Asymptotic p-value of a KS distance `d` for sample size `n`.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn exp_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-x).exp()
    }
}

/// cdf of the geometric law on `{1, 2, ...}` with success probability `q`.
pub fn geometric_cdf(k: u64, q: f64) -> f64 {
    1.0 - (1.0 - q).powf(k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Upper tail of the chi-square law.
pub fn chi_square_p_value(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("df > 0").sf(statistic)
}

/// Pearson goodness-of-fit of counts against cell probabilities. Adjacent
/// cells are merged left to right until each expected count reaches
/// `min_expected` (the remainder joins the last merged cell).
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> ChiSquareTest {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &p) in observed.iter().zip(probs) {
        o += ob as f64;
        e += p * total as f64;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let statistic = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = cells.len().saturating_sub(1);
    ChiSquareTest {
        statistic,
        df,
        p_value: chi_square_p_value(statistic, df),
    }
}

/// Lag-1 sample autocorrelation.
pub fn lag1_autocorrelation(samples: &[f64]) -> f64 {
    let m = mean(samples);
    let var: f64 = samples.iter().map(|x| (x - m) * (x - m)).sum();
    let cov: f64 = samples.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 1.0), 4.0);
        assert_eq!(quantile_sorted(&s, 0.5), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn ks_on_uniform_grid() {
        // midpoints of n cells have KS distance 1 / (2n) to U(0,1)
        let n = 50;
        let s: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&s, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
        assert!(ks_p_value(d, n) > 0.99);
        assert!(ks_p_value(0.3, 1000) < 1e-10);
    }

    #[test]
    fn ks_p_value_reference_point() {
        // Q_KS(1.3581) = 0.05 is the classic 5% critical value
        let n = 1_000_000;
        let d = 1.3581 / ((n as f64).sqrt() + 0.12);
        assert!((ks_p_value(d, n) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn discrete_ks() {
        // sample {1, 1, 2, 3}; against point mass at 1: D = 1/2
        let d = ks_statistic_discrete(&[1, 1, 2, 3], |k| if k >= 1 { 1.0 } else { 0.0 });
        assert!((d - 0.5).abs() < 1e-15);
        // geometric cdf sanity
        assert!((geometric_cdf(1, 0.25) - 0.25).abs() < 1e-15);
        assert!((geometric_cdf(2, 0.25) - (1.0 - 0.5625)).abs() < 1e-15);
    }

    #[test]
    fn chi_square_perfect_fit_and_merge() {
        let t = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4], 5.0);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.df, 3);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        // the tiny tail cell folds into its neighbour
        let t = chi_square_gof(&[50, 49, 1], &[0.5, 0.49, 0.01], 5.0);
        assert_eq!(t.df, 1);
        // chi2 with 1 df at 3.841 has p = 0.05
        assert!((chi_square_p_value(3.841459, 1) - 0.05).abs() < 1e-5);
    }

    #[test]
    fn autocorrelation_of_alternating_series() {
        let s: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((lag1_autocorrelation(&s) + 1.0).abs() < 1e-2);
    }
}
