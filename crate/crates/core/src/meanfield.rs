//! The community-level kernel `Q` and the limiting mixing profiles.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Q(i, i) = 1 - alpha`, `Q(i, j) = alpha / (m - 1)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldKernel {
    pub m: usize,
    pub alpha: f64,
}

fn check(m: usize, alpha: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("m = {m} must be at least 2")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
    }
    Ok(())
}

impl MeanFieldKernel {
    pub fn new(m: usize, alpha: f64) -> Result<Self> {
        check(m, alpha)?;
        Ok(Self { m, alpha })
    }

    /// The nontrivial eigenvalue `1 - m alpha / (m - 1)`.
    pub fn contraction(&self) -> f64 {
        1.0 - self.m as f64 * self.alpha / (self.m - 1) as f64
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0 - self.alpha
        } else {
            self.alpha / (self.m - 1) as f64
        }
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| (0..self.m).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// `Q^t(i, j)` in closed form.
    pub fn power(&self, t: u64, i: usize, j: usize) -> f64 {
        let m = self.m as f64;
        let diag = if i == j { m } else { 0.0 };
        (1.0 + (diag - 1.0) * self.contraction().powf(t as f64)) / m
    }

    pub fn power_row(&self, t: u64, i: usize) -> Vec<f64> {
        (0..self.m).map(|j| self.power(t, i, j)).collect()
    }

    /// Row vector times `Q`.
    pub fn apply(&self, mu: &[f64]) -> Vec<f64> {
        assert_eq!(mu.len(), self.m);
        let total: f64 = mu.iter().sum();
        let off = self.alpha / (self.m - 1) as f64;
        mu.iter().map(|&x| x * (1.0 - self.alpha - off) + total * off).collect()
    }

    /// `TV(Q^t(i, .), uniform)`, the same for every `i`.
    pub fn tv_to_uniform(&self, t: u64) -> f64 {
        let m = self.m as f64;
        (m - 1.0) / m * self.contraction().powf(t as f64).abs()
    }
}

pub fn q_matrix(m: usize, alpha: f64) -> Result<Vec<Vec<f64>>> {
    Ok(MeanFieldKernel::new(m, alpha)?.matrix())
}

pub fn q_power_closed(m: usize, alpha: f64, t: u64, i: usize, j: usize) -> Result<f64> {
    let q = MeanFieldKernel::new(m, alpha)?;
    if i >= m || j >= m {
        return Err(Error::CommunityOutOfRange {
            index: i.max(j),
            count: m,
        });
    }
    Ok(q.power(t, i, j))
}

pub fn meanfield_tv(m: usize, alpha: f64, t: u64) -> Result<f64> {
    Ok(MeanFieldKernel::new(m, alpha)?.tv_to_uniform(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical { c: f64 },
    /// Profile on the entropic timescale `t = beta t_ent`.
    SupercriticalEnt,
    /// Profile on the jump timescale `t = beta / alpha`.
    SupercriticalAlpha,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical { .. } => "critical",
            Regime::SupercriticalEnt => "supercritical_ent",
            Regime::SupercriticalAlpha => "supercritical_alpha",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeProfile {
    pub regime: Regime,
    pub m: usize,
}

impl RegimeProfile {
    pub fn new(regime: Regime, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("m = {m} must be at least 2")));
        }
        if let Regime::Critical { c } = regime {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(format!("critical constant C = {c} must be positive")));
            }
        }
        Ok(Self { regime, m })
    }

    pub fn critical_constant(&self) -> Option<f64> {
        match self.regime {
            Regime::Critical { c } => Some(c),
            _ => None,
        }
    }

    /// Limiting total variation distance at timescale ratio `beta`.
    pub fn value(&self, beta: f64) -> Result<f64> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be positive")));
        }
        let m = self.m as f64;
        let plateau = (m - 1.0) / m;
        let k = m / (m - 1.0);
        if beta == 1.0 && self.regime != Regime::SupercriticalAlpha {
            return Err(Error::UndefinedAtOne);
        }
        let before = if beta < 1.0 { 1.0 } else { 0.0 };
        Ok(match self.regime {
            Regime::Subcritical => before,
            Regime::Critical { c } if beta > 1.0 => plateau * (-(beta / c) * k).exp(),
            Regime::Critical { .. } => before,
            Regime::SupercriticalEnt if beta > 1.0 => plateau,
            Regime::SupercriticalEnt => before,
            Regime::SupercriticalAlpha => plateau * (-beta * k).exp(),
        })
    }

    /// Columns `beta,value,regime,m,C`; `C` is empty outside the critical case.
    pub fn tabulate_csv(&self, betas: &[f64]) -> Result<String> {
        let mut out = String::from("beta,value,regime,m,C\n");
        let c = self.critical_constant().map(|c| c.to_string()).unwrap_or_default();
        for &b in betas {
            let v = self.value(b)?;
            let _ = writeln!(out, "{b},{v},{},{},{c}", self.regime.name(), self.m);
        }
        Ok(out)
    }
}

pub fn limiting_profile(profile: &RegimeProfile, beta: f64) -> Result<f64> {
    profile.value(beta)
}
