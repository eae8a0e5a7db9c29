use super::{l1_distance, push_step, Domain, ProbVector};
use crate::error::{Error, Result};
use crate::graph::Digraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    /// Stop once `||pi P - pi||_1` falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stationary {
    pub pi: ProbVector,
    /// `||pi P - pi||_1` of the returned vector (zero for the uniform fallback).
    pub residual: f64,
    pub iterations: usize,
    /// False when the graph is not strongly connected, in which case `pi` is
    /// the uniform distribution by convention.
    pub strongly_connected: bool,
}

/// Stationary distribution of the walk on the whole graph.
pub fn stationary(graph: &Digraph) -> Result<Stationary> {
    stationary_with(graph, Domain::Global, &StationaryOptions::default())
}

/// Stationary distribution `pi_i` of the walk on the pre-rewiring graph `G_i`.
pub fn local_stationary(graph: &Digraph, i: usize) -> Result<Stationary> {
    let sub = graph.pre_rewiring_subgraph(i)?;
    stationary_with(&sub, Domain::Community(i), &StationaryOptions::default())
}

/// Power iteration on the half-lazy kernel `(P + I) / 2`, which shares the
/// stationary distribution of `P` and is aperiodic. Starts from the
/// normalized in-degrees.
pub fn stationary_with(graph: &Digraph, domain: Domain, opts: &StationaryOptions) -> Result<Stationary> {
    let count = graph.vertex_count();
    if count < 2 || !graph.strongly_connected() {
        return Ok(Stationary {
            pi: ProbVector::uniform(count, domain),
            residual: 0.0,
            iterations: 0,
            strongly_connected: false,
        });
    }

    let mut cur = vec![0.0; count];
    for (_, t, _) in graph.edges() {
        cur[t] += 1.0;
    }
    let total: f64 = cur.iter().sum();
    cur.iter_mut().for_each(|v| *v /= total);

    let mut stepped = vec![0.0; count];
    let mut residual = f64::INFINITY;
    for iteration in 0..opts.max_iterations {
        push_step(graph, &cur, &mut stepped)?;
        residual = l1_distance(&stepped, &cur);
        if residual < opts.tolerance {
            return Ok(Stationary {
                pi: ProbVector::from_raw(cur, domain),
                residual,
                iterations: iteration,
                strongly_connected: true,
            });
        }
        let mut mass = 0.0;
        for (c, s) in cur.iter_mut().zip(&stepped) {
            *c = 0.5 * (*c + s);
            mass += *c;
        }
        cur.iter_mut().for_each(|v| *v /= mass);
    }
    Err(Error::NotConverged {
        what: "stationary power iteration",
        iterations: opts.max_iterations,
        residual,
    })
}
