use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dbm_core::graph::GraphFormat;
use dbm_xp::config::{ExperimentConfig, RegimeSpec, StartSpec, Timescale};
use dbm_xp::experiments;
use dbm_xp::manifest::RunManifest;

#[derive(Parser)]
#[command(name = "dbm-xp", version, about = "Random walk experiments on the directed block model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graphs and write them with a degree summary.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Write the compact binary format instead of text.
        #[arg(long)]
        binary: bool,
    },
    /// Empirical mixing profile against the limiting profile.
    Profile(Common),
    /// Gate analysis, quasi-stationary escape rates and jump statistics.
    Qsd(Common),
    /// Annealed community law and jump survival.
    Annealed(Common),
    /// Proxy equilibrium measures.
    Proxy(Common),
    /// Collect verdicts from every manifest in a directory.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Clone, Copy, ValueEnum)]
enum TimescaleArg {
    Entropic,
    InverseAlpha,
}

#[derive(Args, Clone)]
struct Common {
    /// Start from a named preset.
    #[arg(long)]
    preset: Option<String>,
    /// Start from a TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Critical constant, used with `--regime critical`.
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long, value_enum)]
    timescale: Option<TimescaleArg>,
    /// Comma-separated, e.g. `0.5,1,2`.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Comma-separated list or a range `a..b`.
    #[arg(long)]
    seeds: Option<String>,
    /// `exhaustive` or a number of sampled starts.
    #[arg(long)]
    starts: Option<String>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave timings out of the manifest.
    #[arg(long)]
    deterministic: bool,
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a >= b {
            bail!("empty seed range {s}");
        }
        return Ok((a..b).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse().with_context(|| format!("bad seed {x:?}")))
        .collect()
}

fn parse_starts(s: &str) -> Result<StartSpec> {
    if s == "exhaustive" {
        return Ok(StartSpec::Exhaustive);
    }
    let k = s
        .parse()
        .with_context(|| format!("--starts takes `exhaustive` or a count, got {s:?}"))?;
    Ok(StartSpec::Sampled { k })
}

impl Common {
    fn config(&self, default_preset: &str) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(_), Some(_)) => bail!("--config and --preset are exclusive"),
            (Some(path), None) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::from_toml(&text)?
            }
            (None, Some(name)) => ExperimentConfig::preset(name)?,
            (None, None) => ExperimentConfig::preset(default_preset)?,
        };
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        match self.regime {
            Some(RegimeArg::Subcritical) => cfg.regime = RegimeSpec::Subcritical,
            Some(RegimeArg::Supercritical) => cfg.regime = RegimeSpec::Supercritical,
            Some(RegimeArg::Critical) => {
                let c = self.c.context("--regime critical needs --C")?;
                cfg.regime = RegimeSpec::Critical { c };
            }
            None => {
                if let Some(c) = self.c {
                    match &mut cfg.regime {
                        RegimeSpec::Critical { c: old } => *old = c,
                        _ => bail!("--C applies only to the critical regime"),
                    }
                }
            }
        }
        match self.timescale {
            Some(TimescaleArg::Entropic) => cfg.timescale = Timescale::Entropic,
            Some(TimescaleArg::InverseAlpha) => cfg.timescale = Timescale::InverseAlpha,
            None => {
                // the jump timescale exists only in the supercritical regime
                if cfg.regime != RegimeSpec::Supercritical {
                    cfg.timescale = Timescale::Entropic;
                }
            }
        }
        if let Some(v) = &self.betas {
            cfg.betas = v.clone();
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = parse_seeds(s)?;
        }
        if let Some(s) = &self.starts {
            cfg.starts = parse_starts(s)?;
        }
        if let Some(v) = self.replicas {
            cfg.replicas = v;
        }
        if let Some(v) = self.eps {
            cfg.eps = v;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        cfg.deterministic |= self.deterministic;
        if cfg.seeds.is_empty() {
            bail!("no seeds given");
        }
        Ok(cfg)
    }
}

fn print_verdicts(m: &RunManifest) {
    for v in &m.verdicts {
        println!(
            "{} {}: {} (tolerance {})",
            if v.passed { "PASS" } else { "FAIL" },
            v.name,
            v.value,
            v.tolerance
        );
    }
    println!("manifest: {}", m.file_name());
}

fn run(cli: Cli) -> Result<bool> {
    let (common, preset) = match &cli.command {
        Command::Generate { common, .. } => (Some(common), "supercritical"),
        Command::Profile(c) => (Some(c), "supercritical"),
        Command::Qsd(c) => (Some(c), "qsd"),
        Command::Annealed(c) => (Some(c), "annealed"),
        Command::Proxy(c) => (Some(c), "proxy"),
        Command::Report { .. } => (None, ""),
    };
    let threads = common.and_then(|c| c.threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    pool.install(|| {
        let manifests = match &cli.command {
            Command::Report { out } => experiments::run_report(out)?,
            Command::Generate { binary, .. } => {
                let cfg = common.expect("generate has options").config(preset)?;
                let format = if *binary { GraphFormat::Binary } else { GraphFormat::Text };
                vec![experiments::run_generate(&cfg, format)?]
            }
            cmd => {
                let cfg = common.expect("experiment has options").config(preset)?;
                vec![match cmd {
                    Command::Profile(_) => experiments::run_profile_experiment(&cfg)?.manifest,
                    Command::Qsd(_) => experiments::run_qsd_experiment(&cfg)?.manifest,
                    Command::Annealed(_) => experiments::run_annealed_experiment(&cfg)?.manifest,
                    Command::Proxy(_) => experiments::run_proxy_experiment(&cfg)?.manifest,
                    _ => unreachable!(),
                }]
            }
        };
        for m in &manifests {
            print_verdicts(m);
        }
        Ok(manifests.iter().all(RunManifest::all_passed))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
