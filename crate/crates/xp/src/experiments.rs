//! The experiments behind each subcommand.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use dbm_core::annealed::{annealed_community_law, annealed_jump_survival, AnnealedModel};
use dbm_core::graph::{degree_extremes, generate_dbm, save_graph, GraphFormat};
use dbm_core::meanfield::Regime;
use dbm_core::qsd::{
    analyze_community, jump_target_frequencies, quasi_stationary, restart_process, restart_csv, qsd_csv,
    survival_curve, AnalysisOptions, CommunityView, QsdOptions, QsdResult, RestartOptions,
};
use dbm_core::rng::domain;
use dbm_core::stats::{chi_square_gof, chi_square_p_value, exp_cdf, ks_statistic};
use dbm_core::walk::{
    default_jump_horizon, entropy_and_entropic_time, indegree_approximation, local_stationary, mixing_profile,
    sample_tau_jump, start_set, stationary, stationary_community_masses, Aggregation, JumpTime,
};
use dbm_core::proxy::{nu_measures, nu_spread, proxy_csv, EpsilonSchedule};
use dbm_core::{DbmParams, DegreeTable, Digraph, SeedTree};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Resolved, Timescale};
use crate::manifest::{Output, RunManifest, Verdict};
use crate::svg::{emit_svg, theory_curve};

/// A graph is redrawn at most this many times before the run fails.
pub const MAX_RESAMPLES: u32 = 5;

const RESAMPLE: u64 = 0x7265_7361;
const PROFILE: u64 = 0x7072_6f66;

/// A generated graph that passed the connectivity checks.
#[derive(Debug, Clone)]
pub struct Accepted {
    pub graph: Digraph,
    pub table: DegreeTable,
    /// The parameters actually used; the seed differs from the requested
    /// one after a resample.
    pub params: DbmParams,
    pub resamples: u32,
}

fn acceptable(g: &Digraph, alpha: f64) -> bool {
    (0..g.community_count()).all(|i| g.pre_rewiring_subgraph(i).is_ok_and(|s| s.strongly_connected()))
        && (alpha == 0.0 || g.strongly_connected())
}

/// Generates `params`, redrawing with derived seeds while some community
/// graph or (for `alpha > 0`) the whole graph is not strongly connected.
pub fn accept_graph(params: &DbmParams) -> Result<Accepted> {
    let tree = SeedTree::new(params.seed).child(RESAMPLE);
    for attempt in 0..=MAX_RESAMPLES {
        let p = if attempt == 0 {
            *params
        } else {
            params.with_seed(tree.child(attempt as u64).key())
        };
        let (graph, table) = generate_dbm(&p)?;
        if acceptable(&graph, p.alpha) {
            return Ok(Accepted {
                graph,
                table,
                params: p,
                resamples: attempt,
            });
        }
    }
    bail!(
        "seed {}: graph not strongly connected after {MAX_RESAMPLES} resamples (n = {}, lambda = {})",
        params.seed,
        params.n,
        params.lambda
    )
}

fn note_windows(out: &mut Output, cfg: &ExperimentConfig, r: &Resolved) {
    let w = &cfg.windows;
    out.manifest.notes.push(format!(
        "alpha = {}, analytic t_ent = {:.4}, alpha t_ent = {:.4}",
        r.alpha,
        r.analytic_t_ent,
        r.alpha * r.analytic_t_ent
    ));
    out.manifest.notes.push(format!(
        "windows: subcritical alpha t_ent >= {} and alpha <= {}; supercritical alpha t_ent <= {} and 1/alpha <= lambda n ln(n) / {}",
        w.subcritical_min_alpha_tent,
        w.subcritical_max_alpha,
        w.supercritical_max_alpha_tent,
        w.supercritical_inverse_alpha_factor
    ));
}

fn start_output(cfg: &ExperimentConfig, command: &str) -> Result<Output> {
    let mut manifest = RunManifest::new(command, cfg.hash());
    manifest.seeds_used = cfg.seeds.clone();
    Output::new(&cfg.out, manifest, cfg.deterministic)
}

fn accept_all(cfg: &ExperimentConfig, alpha: f64, out: &mut Output) -> Result<Vec<Accepted>> {
    let graphs = cfg
        .seeds
        .par_iter()
        .map(|&s| accept_graph(&cfg.params(alpha, s)?))
        .collect::<Result<Vec<_>>>()?;
    for (s, a) in cfg.seeds.iter().zip(&graphs) {
        if a.resamples > 0 {
            out.manifest.resamples.push((*s, a.resamples));
        }
    }
    out.lap("generate");
    Ok(graphs)
}

/// One row of the profile table.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub seed: u64,
    pub beta: f64,
    pub t: usize,
    pub t_ent: f64,
    pub distance: f64,
    /// `None` where the limiting profile is undefined.
    pub theory: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ProfileRun {
    pub points: Vec<ProfilePoint>,
    /// Mean distance over seeds for each beta, in config order.
    pub mean: Vec<(f64, f64)>,
    /// `pi(V_j)` per seed.
    pub masses: Vec<Vec<f64>>,
    pub manifest: RunManifest,
}

fn profile_time(timescale: Timescale, beta: f64, t_ent: f64, alpha: f64) -> usize {
    let t = match timescale {
        Timescale::Entropic => beta * t_ent,
        Timescale::InverseAlpha => beta / alpha,
    };
    t.round() as usize
}

/// Empirical profile `max_x TV(P^t(x, .), pi)` on the configured timescale,
/// against the limiting profile.
pub fn run_profile_experiment(cfg: &ExperimentConfig) -> Result<ProfileRun> {
    let resolved = cfg.resolve()?;
    let mut out = start_output(cfg, "profile")?;
    note_windows(&mut out, cfg, &resolved);
    let graphs = accept_all(cfg, resolved.alpha, &mut out)?;
    let m = cfg.m;
    let theory = |b: f64| resolved.profile.value(b).ok();

    let mut points = Vec::new();
    let mut masses = Vec::new();
    for (&seed, acc) in cfg.seeds.iter().zip(&graphs) {
        let g = &acc.graph;
        let pi = stationary(g).with_context(|| format!("stationary distribution, seed {seed}"))?.pi;
        masses.push(stationary_community_masses(g, &pi)?);
        let t_ent = entropy_and_entropic_time(&acc.table, cfg.n, acc.params.p())?.t_ent;
        let times: Vec<usize> = cfg
            .betas
            .iter()
            .map(|&b| profile_time(cfg.timescale, b, t_ent, resolved.alpha))
            .collect();
        let mut grid = times.clone();
        grid.sort_unstable();
        grid.dedup();
        let starts = start_set(g, cfg.start_policy(), SeedTree::new(seed).child(PROFILE).child(domain::STARTS));
        let prof = mixing_profile(g, &starts, &grid, &pi, Aggregation::Max)?.with_meta(acc.params, "pi");
        out.write(&format!("profile_seed{seed}.csv"), &prof.to_csv())?;
        for (&beta, &t) in cfg.betas.iter().zip(&times) {
            let k = grid.binary_search(&t).expect("time is on the grid");
            points.push(ProfilePoint {
                seed,
                beta,
                t,
                t_ent,
                distance: prof.distances[k],
                theory: theory(beta),
            });
        }
    }
    out.lap("profile");

    let mean: Vec<(f64, f64)> = cfg
        .betas
        .iter()
        .map(|&b| {
            let ds: Vec<f64> = points.iter().filter(|p| p.beta == b).map(|p| p.distance).collect();
            (b, ds.iter().sum::<f64>() / ds.len() as f64)
        })
        .collect();

    let mut csv = String::from("seed,beta,t,t_ent,distance,theory\n");
    for p in &points {
        let th = p.theory.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{},{},{},{th}", p.seed, p.beta, p.t, p.t_ent, p.distance);
    }
    out.write("profile.csv", &csv)?;
    let mut csv = String::from("beta,distance,theory,regime,m\n");
    for &(b, d) in &mean {
        let th = theory(b).map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{b},{d},{th},{},{m}", resolved.profile.regime.name());
    }
    out.write("profile_mean.csv", &csv)?;
    let beta_max = cfg.betas.iter().cloned().fold(0.0, f64::max);
    out.write("profile.svg", &emit_svg(&mean, &theory_curve(beta_max, 200, theory)))?;

    let tol = cfg.tolerances;
    let plateau = (m as f64 - 1.0) / m as f64;
    for &(b, d) in &mean {
        let name = |what: &str| format!("{what} at beta = {b}");
        let v = match (resolved.profile.regime, theory(b)) {
            (_, None) => continue,
            (Regime::SupercriticalAlpha, Some(th)) => Verdict::below(name("|d - limit|"), (d - th).abs(), tol.whole_mixing),
            (Regime::Critical { .. }, Some(th)) if b > 1.0 => {
                Verdict::below(name("|d - limit|"), (d - th).abs(), tol.critical_tail)
            }
            (Regime::SupercriticalEnt, Some(_)) if b > 1.0 => {
                Verdict::below(name("|d - plateau|"), (d - plateau).abs(), tol.plateau)
            }
            (Regime::Subcritical, Some(_)) if b > 1.0 => Verdict::below(name("d"), d, tol.step_low),
            (_, Some(_)) => Verdict::above(name("d"), d, tol.step_high),
        };
        out.verdict(v);
    }
    if let Regime::Critical { .. } = resolved.profile.regime {
        let worst = masses
            .iter()
            .flatten()
            .map(|w| (w - 1.0 / m as f64).abs())
            .fold(0.0, f64::max);
        out.verdict(Verdict::below("max |pi(V_j) - 1/m|", worst, tol.mass_balance));
    }
    let mut csv = String::from("seed,community,mass\n");
    for (seed, ms) in cfg.seeds.iter().zip(&masses) {
        for (j, w) in ms.iter().enumerate() {
            let _ = writeln!(csv, "{seed},{j},{w}");
        }
    }
    out.write("masses.csv", &csv)?;
    Ok(ProfileRun {
        points,
        mean,
        masses,
        manifest: out.finish()?,
    })
}

#[derive(Debug, Clone)]
pub struct QsdRun {
    /// Per seed, one result per community.
    pub results: Vec<Vec<QsdResult>>,
    /// Worst `|P_mu*(tau > t) - (1 - iota)^t|` for `t <= 50` over all communities.
    pub survival_error: f64,
    pub geometric_residual: f64,
    pub ks_tau_rho: f64,
    pub ks_tau_jump: f64,
    /// Summed per-row chi-square over pooled graphs, when `m >= 3`.
    pub jump_targets: Option<JumpTargetTest>,
    pub manifest: RunManifest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpTargetTest {
    pub jumps: u64,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// `alpha tau_jump` for `reps` walks from uniform starts in `V_0`.
pub fn jump_time_samples(g: &Digraph, alpha: f64, reps: usize, tree: SeedTree) -> Result<Vec<f64>> {
    let horizon = default_jump_horizon(alpha);
    let width = g.width();
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = tree.stream(r as u64);
            let x = rng.random_range(0..width);
            Ok(match sample_tau_jump(g, x, horizon, &mut rng)? {
                JumpTime::At { step, .. } => alpha * step as f64,
                JumpTime::Censored { horizon } => alpha * horizon as f64,
            })
        })
        .collect()
}

/// Pools one first jump from a uniform vertex of every community over
/// `graphs` independent graphs and tests each row against the uniform law
/// on the other `m - 1` communities.
pub fn jump_target_test(params: &DbmParams, graphs: usize, tree: SeedTree) -> Result<JumpTargetTest> {
    let m = params.m;
    if m < 3 {
        bail!("jump targets are trivial for m = {m}");
    }
    let per_graph = (0..graphs)
        .into_par_iter()
        .map(|k| {
            let node = tree.child(k as u64);
            let acc = accept_graph(&params.with_seed(node.key()))?;
            let g = &acc.graph;
            let mut rng = node.stream(domain::STARTS);
            let starts: Vec<usize> = (0..m).map(|i| i * g.width() + rng.random_range(0..g.width())).collect();
            Ok(jump_target_frequencies(g, &starts, 1, default_jump_horizon(params.alpha), node.child(domain::JUMP))?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = dbm_core::qsd::JumpTargets::new(m);
    for t in &per_graph {
        total.merge(t);
    }
    let uniform = vec![1.0 / (m - 1) as f64; m - 1];
    let (mut statistic, mut df) = (0.0, 0);
    for (i, row) in total.counts.iter().enumerate() {
        let others: Vec<u64> = (0..m).filter(|&j| j != i).map(|j| row[j]).collect();
        let t = chi_square_gof(&others, &uniform, 5.0);
        statistic += t.statistic;
        df += t.df;
    }
    Ok(JumpTargetTest {
        jumps: total.jumps(),
        statistic,
        df,
        p_value: chi_square_p_value(statistic, df),
    })
}

/// Gate analysis of every community on every seed, with restart and jump
/// time statistics on the first seed.
pub fn run_qsd_experiment(cfg: &ExperimentConfig) -> Result<QsdRun> {
    let resolved = cfg.resolve()?;
    if resolved.alpha == 0.0 {
        bail!("alpha = 0 leaves every community without gates");
    }
    let mut out = start_output(cfg, "qsd")?;
    note_windows(&mut out, cfg, &resolved);
    let graphs = accept_all(cfg, resolved.alpha, &mut out)?;
    let opts = AnalysisOptions::default();

    let per_seed = cfg
        .seeds
        .iter()
        .zip(&graphs)
        .map(|(&seed, acc)| {
            (0..cfg.m)
                .map(|i| {
                    let r = analyze_community(&acc.graph, &acc.params, i, &opts, SeedTree::new(seed).child(i as u64))
                        .with_context(|| format!("seed {seed}, community {i}"))?;
                    let view = CommunityView::new(&acc.graph, i)?;
                    let surv = survival_curve(&view, &r.mu_star, 50)?;
                    let err = surv
                        .iter()
                        .enumerate()
                        .map(|(t, s)| (s - (1.0 - r.iota).powi(t as i32)).abs())
                        .fold(0.0, f64::max);
                    Ok((r, err))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    out.lap("analysis");
    let survival_error = per_seed.iter().flatten().map(|x| x.1).fold(0.0, f64::max);
    let results: Vec<Vec<QsdResult>> = per_seed.into_iter().map(|v| v.into_iter().map(|x| x.0).collect()).collect();
    let geometric_residual = results.iter().flatten().map(|r| r.geometric_residual).fold(0.0, f64::max);

    let mut csv = String::from("seed,");
    csv.push_str(&qsd_csv(&[]));
    for (seed, rs) in cfg.seeds.iter().zip(&results) {
        for r in rs {
            let _ = writeln!(csv, "{seed},{}", r.csv_row());
        }
    }
    out.write("qsd.csv", &csv)?;

    let tol = cfg.tolerances;
    out.verdict(Verdict::below("max geometric residual", geometric_residual, 1e-10));
    out.verdict(Verdict::below("max survival error, t <= 50", survival_error, 1e-8));
    let first: Vec<&QsdResult> = results.iter().map(|rs| &rs[0]).collect();
    let seeds = first.len();
    let count = |f: &dyn Fn(&QsdResult) -> bool| first.iter().filter(|r| f(r)).count();
    out.verdict(Verdict::majority(
        format!("seeds with |iota / (lambda alpha ln n) - 1| < {}", tol.iota_relative),
        count(&|r| (r.iota / r.lambda_alpha_logn - 1.0).abs() < tol.iota_relative),
        seeds,
        tol.seed_fraction,
    ));
    out.verdict(Verdict::majority(
        format!("seeds with pi(G) / (lambda alpha ln n) in [{}, {}]", tol.gate_mass_low, tol.gate_mass_high),
        count(&|r| (tol.gate_mass_low..=tol.gate_mass_high).contains(&(r.gate_mass / r.lambda_alpha_logn))),
        seeds,
        tol.seed_fraction,
    ));
    out.verdict(Verdict::majority(
        format!("seeds with R~ in [{}, {}]", tol.return_mass_low, tol.return_mass_high),
        count(&|r| (tol.return_mass_low..=tol.return_mass_high).contains(&r.r_tilde)),
        seeds,
        tol.seed_fraction,
    ));

    // restart and jump statistics on the first seed
    let acc = &graphs[0];
    let alpha = resolved.alpha;
    let tree = SeedTree::new(cfg.seeds[0]);
    let view = CommunityView::new(&acc.graph, 0)?;
    let q = quasi_stationary(&view, &QsdOptions::default())?;
    let restarts = restart_process(
        &view,
        &q.mu_star,
        q.iota,
        &RestartOptions {
            reps: cfg.replicas,
            ..Default::default()
        },
        tree.child(domain::RESTART),
    )?;
    out.write("restart.csv", &restart_csv(&restarts))?;
    let rho: Vec<f64> = restarts.iter().map(|s| alpha * s.tau_rho as f64).collect();
    let jumps = jump_time_samples(&acc.graph, alpha, cfg.replicas, tree.child(domain::JUMP))?;
    let ks_tau_rho = ks_statistic(&rho, exp_cdf);
    let ks_tau_jump = ks_statistic(&jumps, exp_cdf);
    let mut csv = String::from("rep,alpha_tau_jump\n");
    for (r, x) in jumps.iter().enumerate() {
        let _ = writeln!(csv, "{r},{x}");
    }
    out.write("tau_jump.csv", &csv)?;
    out.verdict(Verdict::below("KS(alpha tau_rho, Exp(1))", ks_tau_rho, tol.ks_exponential));
    out.verdict(Verdict::below("KS(alpha tau_jump, Exp(1))", ks_tau_jump, tol.ks_exponential));
    out.lap("restart");

    let jump_targets = if cfg.m >= 3 {
        let test = jump_target_test(&cfg.params(alpha, cfg.seeds[0])?, cfg.jump_graphs, tree.child(0x7467_7473))?;
        out.write(
            "jump_targets.csv",
            &format!(
                "jumps,statistic,df,p_value\n{},{},{},{}\n",
                test.jumps, test.statistic, test.df, test.p_value
            ),
        )?;
        out.verdict(Verdict::above("jump-target chi-square p-value", test.p_value, tol.chi_square_p));
        out.lap("jump targets");
        Some(test)
    } else {
        None
    };

    Ok(QsdRun {
        results,
        survival_error,
        geometric_residual,
        ks_tau_rho,
        ks_tau_jump,
        jump_targets,
        manifest: out.finish()?,
    })
}

#[derive(Debug, Clone)]
pub struct AnnealedRun {
    pub law: dbm_core::annealed::CommunityLaw,
    pub survival: dbm_core::annealed::JumpSurvival,
    pub manifest: RunManifest,
}

/// Annealed community law at `annealed_t` and jump survival up to
/// `survival_t`, both from vertex 0 with `replicas` runs.
pub fn run_annealed_experiment(cfg: &ExperimentConfig) -> Result<AnnealedRun> {
    let params = cfg.params(cfg.alpha, cfg.seeds.first().copied().unwrap_or(0))?;
    let model = AnnealedModel::from_params(&params)?;
    let mut out = start_output(cfg, "annealed")?;
    let tree = SeedTree::new(params.seed).child(domain::ANNEALED);
    let law = annealed_community_law(&model, 0, cfg.annealed_t, cfg.replicas, tree.child(0))?;
    out.write("annealed_law.csv", &law.to_csv())?;
    let mut csv = String::from("t,community,frequency,stderr,q_closed_form\n");
    for i in 0..law.marginal.len() {
        let _ = writeln!(
            csv,
            "{},{i},{},{},{}",
            law.t, law.marginal[i], law.marginal_stderr[i], law.q_closed_form[i]
        );
    }
    out.write("annealed_marginal.csv", &csv)?;
    let survival = annealed_jump_survival(&model, cfg.survival_t, cfg.replicas, tree.child(1))?;
    out.write("annealed_survival.csv", &survival.to_csv())?;
    out.lap("annealed");
    if !law.within_short_time {
        out.manifest
            .notes
            .push(format!("t = {} is outside the short-time window of the annealed law", law.t));
    }
    if law.discarded > 0 || survival.discarded > 0 {
        out.manifest.notes.push(format!(
            "runs stuck at a vertex without out-edges: {} (law), {} (survival)",
            law.discarded, survival.discarded
        ));
    }
    let tol = cfg.tolerances;
    for i in 0..law.joint.len() {
        let se = law.joint_stderr[i];
        out.verdict(Verdict::below(
            format!("|P(X_t in V_{i}, C_t) - Q^t| in standard errors"),
            (law.joint[i] - law.q_closed_form[i]).abs() / se,
            tol.standard_errors,
        ));
    }
    out.verdict(Verdict::below("cycle-free failure rate", law.cycle_free_failure_rate, tol.cycle_failure));
    let t = cfg.survival_t;
    out.verdict(Verdict::below(
        format!("|P(tau_jump > {t}) - (1 - alpha)^{t}| in standard errors"),
        (survival.survival[t] - survival.theory[t]).abs() / survival.stderr[t],
        tol.standard_errors,
    ));
    Ok(AnnealedRun {
        law,
        survival,
        manifest: out.finish()?,
    })
}

#[derive(Debug, Clone)]
pub struct ProxyRun {
    /// `TV(nu, pi)` per seed.
    pub to_pi: Vec<f64>,
    /// `max_i TV(nu_i, nu)` per seed.
    pub spread: Vec<f64>,
    pub manifest: RunManifest,
}

pub fn run_proxy_experiment(cfg: &ExperimentConfig) -> Result<ProxyRun> {
    let resolved = cfg.resolve()?;
    let mut out = start_output(cfg, "proxy")?;
    note_windows(&mut out, cfg, &resolved);
    let graphs = accept_all(cfg, resolved.alpha, &mut out)?;
    let (mut to_pi, mut spread) = (Vec::new(), Vec::new());
    for (&seed, acc) in cfg.seeds.iter().zip(&graphs) {
        let g = &acc.graph;
        let pi = stationary(g)?.pi;
        let t_ent = entropy_and_entropic_time(&acc.table, cfg.n, acc.params.p())?.t_ent;
        let schedule = EpsilonSchedule::new(cfg.eps, t_ent)?;
        let nu = nu_measures(g, &schedule, resolved.alpha)?;
        out.write(&format!("proxy_seed{seed}.csv"), &proxy_csv(&nu, &pi)?)?;
        to_pi.push(dbm_core::walk::tv_distance(&nu.nu, &pi)?);
        spread.push(nu_spread(&nu)?);
    }
    out.lap("proxy");
    let tol = cfg.tolerances;
    out.verdict(Verdict::below("max TV(nu, pi)", to_pi.iter().cloned().fold(0.0, f64::max), tol.proxy_tv));
    out.verdict(Verdict::below("max TV(nu_i, nu)", spread.iter().cloned().fold(0.0, f64::max), tol.proxy_tv));
    Ok(ProxyRun {
        to_pi,
        spread,
        manifest: out.finish()?,
    })
}

/// Saves every seed's accepted graph with a degree summary.
pub fn run_generate(cfg: &ExperimentConfig, format: GraphFormat) -> Result<RunManifest> {
    let alpha = match cfg.resolve() {
        Ok(r) => r.alpha,
        // a graph can be generated without claiming a regime
        Err(_) => cfg.alpha,
    };
    let mut out = start_output(cfg, "generate")?;
    let graphs = accept_all(cfg, alpha, &mut out)?;
    let mut csv = String::from(
        "seed,graph_seed,resamples,edges,rewired,min_degree,max_degree,min_ratio,max_ratio,h,t_ent,analytic_t_ent,indegree_max_rel_err\n",
    );
    for (&seed, acc) in cfg.seeds.iter().zip(&graphs) {
        let (g, p) = (&acc.graph, &acc.params);
        let ext = degree_extremes(&acc.table, p.degree_scale());
        let e = entropy_and_entropic_time(&acc.table, p.n, p.p())?;
        let pi0 = local_stationary(g, 0)?.pi;
        let ind = indegree_approximation(g, &acc.table, p, 0, &pi0)?;
        let _ = writeln!(
            csv,
            "{seed},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.seed,
            acc.resamples,
            g.edge_count(),
            g.rewired_edge_count(),
            ext.min,
            ext.max,
            ext.min_ratio,
            ext.max_ratio,
            e.h,
            e.t_ent,
            e.analytic_t_ent,
            ind.max_rel_err
        );
        let name = match format {
            GraphFormat::Text => format!("graph_seed{seed}.dbm"),
            GraphFormat::Binary => format!("graph_seed{seed}.dbmb"),
        };
        save_graph(g, p, &out.dir.join(&name), format)?;
        out.manifest.artifacts.push(name);
    }
    out.write("degrees.csv", &csv)?;
    out.lap("save");
    out.finish()
}

/// Collects the verdicts of every manifest in `dir` into `report.csv`.
pub fn run_report(dir: &std::path::Path) -> Result<Vec<RunManifest>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("manifest_") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    let manifests = paths.iter().map(|p| RunManifest::read(p)).collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("command,verdict,passed,value,tolerance\n");
    for m in &manifests {
        for v in &m.verdicts {
            let _ = writeln!(csv, "{},\"{}\",{},{},\"{}\"", m.command, v.name, v.passed, v.value, v.tolerance);
        }
    }
    std::fs::write(dir.join("report.csv"), csv)?;
    Ok(manifests)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resampling_is_reproducible() {
        // n = 8 at lambda = 1 is often not strongly connected
        let params = DbmParams::new(8, 2, 1.0, 0.1, 3).unwrap();
        let a = accept_graph(&params);
        let b = accept_graph(&params);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.params, b.params);
                assert_eq!(a.graph, b.graph);
                assert!(acceptable(&a.graph, 0.1));
            }
            (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
            _ => panic!("accept_graph is not deterministic"),
        }
    }

    #[test]
    fn hopeless_graphs_are_rejected() {
        // out-degree is almost always zero somewhere at this density
        let params = DbmParams::new(50, 2, 0.05, 0.1, 0).unwrap();
        let err = accept_graph(&params).unwrap_err().to_string();
        assert!(err.contains("after 5 resamples"), "{err}");
    }

    #[test]
    fn rounding_of_profile_times() {
        assert_eq!(profile_time(Timescale::Entropic, 1.5, 2.98, 0.3), 4);
        assert_eq!(profile_time(Timescale::InverseAlpha, 0.5, 3.0, 0.002), 250);
    }
}
