use std::fmt::Write as _;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_len, l1_distance, push_step, ProbVector};
use crate::error::{Error, Result};
use crate::graph::{DbmParams, Digraph};
use crate::rng::SeedTree;

/// Below this many vertices, start sets are exhaustive.
pub const EXHAUSTIVE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Max,
    Mean,
}

impl std::fmt::Display for Aggregation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Aggregation::Max => "max",
            Aggregation::Mean => "mean",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartPolicy {
    Exhaustive,
    /// `k` uniform starts plus the minimum- and maximum-out-degree vertices;
    /// exhaustive anyway on graphs with at most 2000 vertices.
    Sampled(usize),
}

/// The start vertices used to approximate a maximum over all vertices.
pub fn start_set(graph: &Digraph, policy: StartPolicy, streams: SeedTree) -> Vec<usize> {
    let count = graph.vertex_count();
    match policy {
        StartPolicy::Sampled(k) if count > EXHAUSTIVE_LIMIT && k < count => {
            let mut rng = streams.rng();
            let mut starts = index::sample(&mut rng, count, k).into_vec();
            let by_degree = |v: &usize| (graph.out_degree(*v), *v);
            starts.extend((0..count).min_by_key(by_degree));
            starts.extend((0..count).max_by_key(by_degree));
            starts.sort_unstable();
            starts.dedup();
            starts
        }
        _ => (0..count).collect(),
    }
}

/// Total variation distance to a reference over time, aggregated over starts.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingProfile {
    pub times: Vec<usize>,
    pub distances: Vec<f64>,
    pub aggregation: Aggregation,
    pub params: Option<DbmParams>,
    /// Identifies the reference distribution, e.g. `pi`.
    pub reference: String,
}

impl MixingProfile {
    pub fn with_meta(mut self, params: DbmParams, reference: impl Into<String>) -> Self {
        self.params = Some(params);
        self.reference = reference.into();
        self
    }

    pub const CSV_HEADER: &'static str = "t,distance,aggregation,n,m,lambda,alpha,seed,reference";

    /// Columns `t,distance,aggregation,n,m,lambda,alpha,seed,reference`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let meta = match &self.params {
            Some(p) => format!("{},{},{},{},{}", p.n, p.m, p.lambda, p.alpha, p.seed),
            None => ",,,,".to_string(),
        };
        for (t, d) in self.times.iter().zip(&self.distances) {
            let _ = writeln!(out, "{t},{d},{},{meta},{}", self.aggregation, self.reference);
        }
        out
    }
}

/// Distances `TV(P^t(x, .), reference)` for each start `x` (outer index) and
/// each requested time (inner index). Times must be strictly increasing.
pub fn distance_curves(
    graph: &Digraph,
    starts: &[usize],
    times: &[usize],
    reference: &ProbVector,
) -> Result<Vec<Vec<f64>>> {
    check_len(graph, reference)?;
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("profile times must be strictly increasing".into()));
    }
    for &x in starts {
        graph.check_vertex(x)?;
    }
    let count = graph.vertex_count();
    let pi = reference.values();
    starts
        .par_iter()
        .map(|&x| {
            let mut cur = vec![0.0; count];
            let mut next = vec![0.0; count];
            cur[x] = 1.0;
            let mut now = 0;
            let mut out = Vec::with_capacity(times.len());
            for &t in times {
                while now < t {
                    push_step(graph, &cur, &mut next)?;
                    std::mem::swap(&mut cur, &mut next);
                    now += 1;
                }
                out.push((0.5 * l1_distance(&cur, pi)).min(1.0));
            }
            Ok(out)
        })
        .collect()
}

/// Evolves a point mass from every start and aggregates the distance to
/// `reference` at each time. Aggregation runs in start order, so results do
/// not depend on the thread count.
pub fn mixing_profile(
    graph: &Digraph,
    starts: &[usize],
    times: &[usize],
    reference: &ProbVector,
    aggregation: Aggregation,
) -> Result<MixingProfile> {
    if starts.is_empty() {
        return Err(Error::InvalidParameter("empty start set".into()));
    }
    let curves = distance_curves(graph, starts, times, reference)?;
    let distances = (0..times.len())
        .map(|k| {
            let column = curves.iter().map(|c| c[k]);
            match aggregation {
                Aggregation::Max => column.fold(0.0, f64::max),
                Aggregation::Mean => column.sum::<f64>() / starts.len() as f64,
            }
        })
        .collect();
    Ok(MixingProfile {
        times: times.to_vec(),
        distances,
        aggregation,
        params: None,
        reference: "pi".into(),
    })
}
