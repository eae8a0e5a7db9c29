//! Experiment configuration, presets and regime guards.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use dbm_core::meanfield::{Regime, RegimeProfile};
use dbm_core::walk::binomial_log_degree_mean;
use dbm_core::DbmParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegimeSpec {
    Subcritical,
    /// `alpha` is set to `1 / (c t_ent)`.
    Critical { c: f64 },
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Timescale {
    /// `t = beta t_ent`
    Entropic,
    /// `t = beta / alpha`
    InverseAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StartSpec {
    Exhaustive,
    Sampled { k: usize },
}

/// Bounds on `alpha t_ent` and `alpha` that decide which regime a
/// configuration may claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegimeWindows {
    pub subcritical_min_alpha_tent: f64,
    pub subcritical_max_alpha: f64,
    pub supercritical_max_alpha_tent: f64,
    /// Supercritical runs need `1 / alpha <= lambda n ln(n) / factor`.
    pub supercritical_inverse_alpha_factor: f64,
}

impl Default for RegimeWindows {
    fn default() -> Self {
        Self {
            subcritical_min_alpha_tent: 0.8,
            subcritical_max_alpha: 0.5,
            supercritical_max_alpha_tent: 0.2,
            supercritical_inverse_alpha_factor: 10.0,
        }
    }
}

/// Pass/fail thresholds. Every verdict records the value it was checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Distance required before a step, `d > step_high`.
    pub step_high: f64,
    /// Distance required after the subcritical step, `d < step_low`.
    pub step_low: f64,
    pub critical_tail: f64,
    pub whole_mixing: f64,
    pub plateau: f64,
    pub mass_balance: f64,
    pub iota_relative: f64,
    pub gate_mass_low: f64,
    pub gate_mass_high: f64,
    pub return_mass_low: f64,
    pub return_mass_high: f64,
    /// Fraction of seeds on which a per-seed check must hold.
    pub seed_fraction: f64,
    pub ks_exponential: f64,
    pub chi_square_p: f64,
    pub standard_errors: f64,
    pub cycle_failure: f64,
    pub proxy_tv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            step_high: 0.8,
            step_low: 0.25,
            critical_tail: 0.15,
            whole_mixing: 0.1,
            plateau: 0.12,
            mass_balance: 0.02,
            iota_relative: 0.25,
            gate_mass_low: 0.7,
            gate_mass_high: 1.3,
            return_mass_low: 1.0,
            return_mass_high: 1.2,
            seed_fraction: 0.85,
            ks_exponential: 0.08,
            chi_square_p: 0.01,
            standard_errors: 3.0,
            cycle_failure: 0.01,
            proxy_tv: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    /// Ignored in the critical regime, where it is derived from `C`.
    pub alpha: f64,
    pub regime: RegimeSpec,
    pub timescale: Timescale,
    pub betas: Vec<f64>,
    pub starts: StartSpec,
    pub seeds: Vec<u64>,
    /// Monte Carlo sample count per seed.
    pub replicas: usize,
    /// Proxy measure accuracy parameter.
    pub eps: f64,
    /// Time of the annealed community law.
    pub annealed_t: usize,
    /// Horizon of the annealed jump survival curve.
    pub survival_t: usize,
    /// Graphs pooled for the jump-target test, one jump per community each.
    pub jump_graphs: usize,
    pub out: PathBuf,
    /// Leave wall-clock data out of every artifact.
    pub deterministic: bool,
    pub windows: RegimeWindows,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 4000,
            m: 2,
            lambda: 2.0,
            alpha: 0.002,
            regime: RegimeSpec::Supercritical,
            timescale: Timescale::InverseAlpha,
            betas: vec![0.5, 1.0, 2.0],
            starts: StartSpec::Sampled { k: 64 },
            seeds: vec![0, 1, 2],
            replicas: 10_000,
            eps: dbm_core::proxy::DEFAULT_EPS,
            annealed_t: 10,
            survival_t: 50,
            jump_graphs: 2500,
            out: PathBuf::from("out"),
            deterministic: false,
            windows: RegimeWindows::default(),
            tolerances: Tolerances::default(),
        }
    }
}

pub const PRESETS: &[&str] = &["subcritical", "critical", "supercritical", "plateau", "qsd", "jumps", "annealed", "proxy"];

/// What a configuration resolves to once its regime has been checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub alpha: f64,
    /// `ln n / E[ln(D v 1)]` for `D ~ Binomial(n - 1, p)`.
    pub analytic_t_ent: f64,
    pub profile: RegimeProfile,
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self::default();
        Ok(match name {
            "subcritical" => Self {
                alpha: 0.3,
                regime: RegimeSpec::Subcritical,
                timescale: Timescale::Entropic,
                betas: vec![0.5, 1.5],
                ..base
            },
            "critical" => Self {
                regime: RegimeSpec::Critical { c: 2.0 },
                timescale: Timescale::Entropic,
                betas: vec![0.5, 2.0, 3.0],
                ..base
            },
            "supercritical" => base,
            "plateau" => Self {
                timescale: Timescale::Entropic,
                betas: vec![5.0],
                ..base
            },
            "qsd" => Self {
                seeds: (0..20).collect(),
                ..base
            },
            "jumps" => Self {
                n: 2000,
                m: 4,
                seeds: vec![0],
                ..base
            },
            "annealed" => Self {
                n: 2000,
                alpha: 0.05,
                seeds: vec![0],
                replicas: 100_000,
                ..base
            },
            "proxy" => Self {
                alpha: 0.3,
                regime: RegimeSpec::Subcritical,
                timescale: Timescale::Entropic,
                seeds: vec![0],
                ..base
            },
            _ => bail!("unknown preset {name:?}; expected one of {}", PRESETS.join(", ")),
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing experiment config")
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing experiment config")
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config is always serializable");
        hex::encode(Sha256::digest(&json))
    }

    pub fn analytic_t_ent(&self) -> Result<f64> {
        let p = DbmParams::new(self.n, self.m, self.lambda, 0.0, 0)?.p();
        let h = binomial_log_degree_mean(self.n as u64 - 1, p);
        ensure!(h > 0.0, "mean log degree is zero at n = {}, lambda = {}", self.n, self.lambda);
        Ok((self.n as f64).ln() / h)
    }

    /// Checks the regime window before any sampling and fixes `alpha`.
    pub fn resolve(&self) -> Result<Resolved> {
        let t_ent = self.analytic_t_ent()?;
        let w = &self.windows;
        let (alpha, regime) = match self.regime {
            RegimeSpec::Subcritical => {
                let a = self.alpha;
                ensure!(
                    a * t_ent >= w.subcritical_min_alpha_tent && a <= w.subcritical_max_alpha,
                    "alpha = {a} is not subcritical: needs alpha t_ent = {:.3} >= {} and alpha <= {}",
                    a * t_ent,
                    w.subcritical_min_alpha_tent,
                    w.subcritical_max_alpha
                );
                (a, Regime::Subcritical)
            }
            RegimeSpec::Critical { c } => {
                ensure!(c > 0.0 && c.is_finite(), "critical constant C = {c} must be positive");
                (1.0 / (c * t_ent), Regime::Critical { c })
            }
            RegimeSpec::Supercritical => {
                let a = self.alpha;
                let cap = self.lambda * self.n as f64 * (self.n as f64).ln() / w.supercritical_inverse_alpha_factor;
                ensure!(
                    a > 0.0 && a * t_ent <= w.supercritical_max_alpha_tent && 1.0 / a <= cap,
                    "alpha = {a} is not supercritical: needs alpha t_ent = {:.3} <= {} and 1/alpha <= {cap:.1}",
                    a * t_ent,
                    w.supercritical_max_alpha_tent
                );
                let r = match self.timescale {
                    Timescale::Entropic => Regime::SupercriticalEnt,
                    Timescale::InverseAlpha => Regime::SupercriticalAlpha,
                };
                (a, r)
            }
        };
        if self.timescale == Timescale::InverseAlpha {
            ensure!(
                matches!(self.regime, RegimeSpec::Supercritical),
                "the inverse-alpha timescale is only defined for supercritical runs"
            );
        }
        ensure!(self.betas.iter().all(|b| *b > 0.0 && b.is_finite()), "betas must be positive");
        DbmParams::new(self.n, self.m, self.lambda, alpha, 0)?;
        Ok(Resolved {
            alpha,
            analytic_t_ent: t_ent,
            profile: RegimeProfile::new(regime, self.m)?,
        })
    }

    pub fn params(&self, alpha: f64, seed: u64) -> Result<DbmParams> {
        Ok(DbmParams::new(self.n, self.m, self.lambda, alpha, seed)?)
    }

    pub fn start_policy(&self) -> dbm_core::walk::StartPolicy {
        match self.starts {
            StartSpec::Exhaustive => dbm_core::walk::StartPolicy::Exhaustive,
            StartSpec::Sampled { k } => dbm_core::walk::StartPolicy::Sampled(k),
        }
    }
}
