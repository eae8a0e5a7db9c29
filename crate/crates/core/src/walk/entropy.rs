use statrs::distribution::{Binomial, Discrete};

use crate::error::{Error, Result};
use crate::graph::DegreeTable;

/// Row entropy of the walk and the associated entropic time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entropy {
    /// `(1 / |V|) sum_v ln(D+(v) v 1)` over the table.
    pub h: f64,
    /// `ln(n) / h`.
    pub t_ent: f64,
    /// `E[ln(D v 1)]` for `D ~ Binomial(n - 1, p)`, by exact pmf summation.
    pub analytic_h: f64,
    pub analytic_t_ent: f64,
    /// `ln ln n`, the leading-order growth of the entropy.
    pub first_order_h: f64,
}

/// `E[ln(D v 1)]` for `D ~ Binomial(trials, p)`.
pub fn binomial_log_degree_mean(trials: u64, p: f64) -> f64 {
    if trials == 0 || p <= 0.0 {
        return 0.0;
    }
    let dist = Binomial::new(p.min(1.0), trials).expect("valid binomial");
    (2..=trials).map(|j| dist.pmf(j) * (j as f64).ln()).sum()
}

/// Empirical and analytic entropy for community width `n` and edge
/// probability `p`.
pub fn entropy_and_entropic_time(table: &DegreeTable, n: usize, p: f64) -> Result<Entropy> {
    if table.is_empty() {
        return Err(Error::ZeroEntropy);
    }
    let h = table
        .out_total
        .iter()
        .map(|&d| (d.max(1) as f64).ln())
        .sum::<f64>()
        / table.len() as f64;
    if h <= 0.0 {
        return Err(Error::ZeroEntropy);
    }
    let log_n = (n as f64).ln();
    let analytic_h = binomial_log_degree_mean(n.saturating_sub(1) as u64, p);
    Ok(Entropy {
        h,
        t_ent: log_n / h,
        analytic_h,
        analytic_t_ent: log_n / analytic_h,
        first_order_h: log_n.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(degrees: &[u32]) -> DegreeTable {
        let z = vec![0; degrees.len()];
        DegreeTable {
            out_total: degrees.to_vec(),
            out_intra: degrees.to_vec(),
            out_rewired: z.clone(),
            in_total: z.clone(),
            in_intra_pre: z,
        }
    }

    #[test]
    fn constant_degree() {
        let e = entropy_and_entropic_time(&table(&[5; 10]), 100, 0.05).unwrap();
        assert!((e.h - 5f64.ln()).abs() < 1e-15);
        assert!((e.t_ent - 100f64.ln() / 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn analytic_binomial_four_half() {
        let want = 2f64.ln() / 2.0 + 3f64.ln() / 4.0;
        assert!((binomial_log_degree_mean(4, 0.5) - want).abs() < 1e-14);
        assert!((want - 0.62123).abs() < 1e-5);
    }

    #[test]
    fn zero_entropy_is_an_error() {
        assert!(matches!(
            entropy_and_entropic_time(&table(&[0, 1, 1]), 10, 0.1),
            Err(Error::ZeroEntropy)
        ));
    }
}
