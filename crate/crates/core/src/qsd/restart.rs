use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;

use super::CommunityView;
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::rng::SeedTree;
use crate::walk::{sample_tau_jump, JumpTime, ProbVector};

/// One run of the marked restart process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestartSample {
    /// Time of the first successful gate coin, or the cap when censored.
    pub tau_rho: u64,
    pub censored: bool,
    /// Gaps between consecutive gate visits, the first measured from time 0.
    pub sigma_list: Vec<u64>,
    pub kappa_final: u64,
    pub rho_final: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartOptions {
    pub reps: usize,
    /// Censoring horizon as a multiple of `1 / iota`.
    pub cap_multiplier: f64,
}

impl Default for RestartOptions {
    fn default() -> Self {
        Self {
            reps: 10_000,
            cap_multiplier: 100.0,
        }
    }
}

/// Simulates the walk `Y` on `G_i` started from `mu*`. Each time `Y` sits on
/// a gate `v`, the gate counter `kappa` grows and a coin with success
/// probability `O+_v / D+_v` is tossed; on failure the next position is
/// drawn from `mu* P_i`. The run stops at the first success.
///
/// Replica `r` uses stream `r` of `streams`.
pub fn restart_process(
    view: &CommunityView,
    mu_star: &ProbVector,
    iota: f64,
    opts: &RestartOptions,
    streams: SeedTree,
) -> Result<Vec<RestartSample>> {
    view.check_local(mu_star)?;
    if !(iota > 0.0 && iota < 1.0) {
        return Err(Error::InvalidParameter(format!("iota = {iota} outside (0, 1)")));
    }
    if view.gates().is_empty() {
        return Err(Error::NoGates(view.community()));
    }
    let sampler = WeightedIndex::new(mu_star.values()).map_err(|e| Error::NotProbability(e.to_string()))?;
    let cap = (opts.cap_multiplier / iota).ceil() as u64;
    let sub = view.subgraph();
    (0..opts.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = streams.stream(rep as u64);
            let mut pos = sampler.sample(&mut rng);
            let mut restart = false;
            let mut sample = RestartSample {
                tau_rho: cap,
                censored: true,
                sigma_list: Vec::new(),
                kappa_final: 0,
                rho_final: 0,
            };
            let mut last_visit = 0;
            for t in 1..=cap {
                let from = if restart { sampler.sample(&mut rng) } else { pos };
                let row = sub.out_neighbors(from);
                if row.is_empty() {
                    return Err(Error::Sink {
                        vertex: from + view.offset,
                    });
                }
                pos = row[rng.random_range(0..row.len())] as usize;
                restart = false;
                if view.is_gate(pos) {
                    sample.kappa_final += 1;
                    sample.sigma_list.push(t - last_visit);
                    last_visit = t;
                    let success = view.rewired_out(pos) as f64 / view.out_degree(pos) as f64;
                    if rng.random::<f64>() < success {
                        sample.rho_final = 1;
                        sample.tau_rho = t;
                        sample.censored = false;
                        break;
                    }
                    restart = true;
                }
            }
            Ok(sample)
        })
        .collect()
}

/// Columns `rep,tau_rho,kappa,rho`.
pub fn restart_csv(samples: &[RestartSample]) -> String {
    let mut out = String::from("rep,tau_rho,kappa,rho\n");
    for (r, s) in samples.iter().enumerate() {
        let _ = writeln!(out, "{r},{},{},{}", s.tau_rho, s.kappa_final, s.rho_final);
    }
    out
}

/// Counts of first-jump target communities, by starting community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpTargets {
    /// `counts[i][j]`: walks started in `V_i` whose first jump lands in `V_j`.
    pub counts: Vec<Vec<u64>>,
    /// Walks started in `V_i` that did not jump within the horizon.
    pub censored: Vec<u64>,
}

impl JumpTargets {
    pub fn new(m: usize) -> Self {
        Self {
            counts: vec![vec![0; m]; m],
            censored: vec![0; m],
        }
    }

    pub fn merge(&mut self, other: &JumpTargets) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (x, y) in self.censored.iter_mut().zip(&other.censored) {
            *x += y;
        }
    }

    pub fn jumps(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Row-normalized frequencies over completed jumps.
    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let total: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
                    .collect()
            })
            .collect()
    }
}

/// Runs `reps` walks from each start until their first community change.
/// Replica `r` of start `k` uses stream `k * reps + r`.
pub fn jump_target_frequencies(
    graph: &Digraph,
    starts: &[usize],
    reps: usize,
    horizon: u64,
    streams: SeedTree,
) -> Result<JumpTargets> {
    let m = graph.community_count();
    let outcomes = (0..starts.len() * reps)
        .into_par_iter()
        .map(|task| {
            let x = starts[task / reps];
            let mut rng = streams.stream(task as u64);
            Ok((graph.community_of(x)?, sample_tau_jump(graph, x, horizon, &mut rng)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = JumpTargets::new(m);
    for (i, jump) in outcomes {
        match jump {
            JumpTime::At { vertex, .. } => out.counts[i][graph.community(vertex)] += 1,
            JumpTime::Censored { .. } => out.censored[i] += 1,
        }
    }
    Ok(out)
}
