//! The simple random walk: exact distribution evolution, stationary measures,
//! total variation distances, and trajectory sampling.

mod entropy;
mod profile;
mod sample;
mod stationary;

use crate::error::{Error, Result};
use crate::graph::{DbmParams, DegreeTable, Digraph};

pub use entropy::{binomial_log_degree_mean, entropy_and_entropic_time, Entropy};
pub use profile::{distance_curves, mixing_profile, start_set, Aggregation, MixingProfile, StartPolicy};
pub use sample::{
    default_jump_horizon, path_mass_lln, sample_tau_jump, sample_trajectory, JumpTime, PathMassSummary,
    Trajectory,
};
pub use stationary::{local_stationary, stationary, stationary_with, Stationary, StationaryOptions};

/// Tolerance on total mass accepted by [`ProbVector::new`].
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Which vertex set a distribution lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Global,
    /// Local labels `0..n` of one community.
    Community(usize),
    /// Non-gate states of one community followed by the merged gate state.
    Merged(usize),
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::Global => write!(f, "global"),
            Domain::Community(i) => write!(f, "community {i}"),
            Domain::Merged(i) => write!(f, "merged community {i}"),
        }
    }
}

/// Dense probability distribution over a vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    values: Vec<f64>,
    domain: Domain,
}

impl ProbVector {
    pub fn new(values: Vec<f64>, domain: Domain) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::NotProbability(format!("entry {i} = {v}")));
        }
        let mass: f64 = values.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::NotProbability(format!("total mass {mass}")));
        }
        Ok(Self { values, domain })
    }

    pub(crate) fn from_raw(values: Vec<f64>, domain: Domain) -> Self {
        Self { values, domain }
    }

    pub fn uniform(len: usize, domain: Domain) -> Self {
        Self {
            values: vec![1.0 / len as f64; len],
            domain,
        }
    }

    pub fn point(len: usize, at: usize, domain: Domain) -> Self {
        let mut values = vec![0.0; len];
        values[at] = 1.0;
        Self { values, domain }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

fn check_len(graph: &Digraph, mu: &ProbVector) -> Result<()> {
    if mu.len() == graph.vertex_count() {
        Ok(())
    } else {
        Err(Error::DomainMismatch {
            expected: format!("{} vertices", graph.vertex_count()),
            found: format!("{} entries ({})", mu.len(), mu.domain),
        })
    }
}

/// `dst = src * P` for the uniform out-edge kernel.
pub(crate) fn push_step(graph: &Digraph, src: &[f64], dst: &mut [f64]) -> Result<()> {
    dst.fill(0.0);
    for (x, &w) in src.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let row = graph.out_neighbors(x);
        if row.is_empty() {
            return Err(Error::Sink { vertex: x });
        }
        let share = w / row.len() as f64;
        for &y in row {
            dst[y as usize] += share;
        }
    }
    Ok(())
}

/// One step of the walk: `(mu P)(y) = sum over x -> y of mu(x) / D+(x)`.
pub fn step_distribution(graph: &Digraph, mu: &ProbVector) -> Result<ProbVector> {
    evolve(graph, mu, 1)
}

/// `t` steps of the walk.
pub fn evolve(graph: &Digraph, mu: &ProbVector, t: usize) -> Result<ProbVector> {
    check_len(graph, mu)?;
    let mut cur = mu.values.clone();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..t {
        push_step(graph, &cur, &mut next)?;
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(ProbVector::from_raw(cur, mu.domain))
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Total variation distance `1/2 sum |mu - nu|`.
pub fn tv_distance(mu: &ProbVector, nu: &ProbVector) -> Result<f64> {
    if mu.domain != nu.domain || mu.len() != nu.len() {
        return Err(Error::DomainMismatch {
            expected: format!("{} ({} entries)", mu.domain, mu.len()),
            found: format!("{} ({} entries)", nu.domain, nu.len()),
        });
    }
    Ok((0.5 * l1_distance(&mu.values, &nu.values)).min(1.0))
}

/// `mu` conditioned on `subset`.
pub fn restrict_normalize(mu: &ProbVector, subset: &[usize]) -> Result<ProbVector> {
    let mut values = vec![0.0; mu.len()];
    for &x in subset {
        if x >= mu.len() {
            return Err(Error::VertexOutOfRange {
                vertex: x,
                count: mu.len(),
            });
        }
        values[x] = mu.values[x];
    }
    let mass: f64 = values.iter().sum();
    if mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    values.iter_mut().for_each(|v| *v /= mass);
    Ok(ProbVector::from_raw(values, mu.domain))
}

/// `mu(V_i)` for every community of a global distribution.
pub fn community_mass(graph: &Digraph, mu: &ProbVector) -> Result<Vec<f64>> {
    check_len(graph, mu)?;
    Ok((0..graph.community_count())
        .map(|i| mu.values[graph.community_range(i)].iter().sum())
        .collect())
}

/// `pi(V_j)` for each community.
pub fn stationary_community_masses(graph: &Digraph, pi: &ProbVector) -> Result<Vec<f64>> {
    community_mass(graph, pi)
}

/// In-degree proxy for a local stationary distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct InDegreeApprox {
    /// `D-_intra(x) / (p n^2)`, renormalized to a probability vector.
    pub approx: ProbVector,
    /// `max_x |pi_i(x) / (D-_intra(x) / (p n^2)) - 1|` over vertices with
    /// positive in-degree.
    pub max_rel_err: f64,
    /// Local labels with zero pre-rewiring in-degree, excluded from the ratio.
    pub zero_in_degree: Vec<usize>,
}

/// Compares `pi_i` with the normalized pre-rewiring in-degrees of community `i`.
pub fn indegree_approximation(
    graph: &Digraph,
    table: &DegreeTable,
    params: &DbmParams,
    i: usize,
    pi_i: &ProbVector,
) -> Result<InDegreeApprox> {
    graph.check_community(i)?;
    if pi_i.len() != graph.width() {
        return Err(Error::DomainMismatch {
            expected: format!("{} entries", graph.width()),
            found: format!("{} entries", pi_i.len()),
        });
    }
    let n = params.n as f64;
    let scale = params.p() * n * n;
    let degrees = &table.in_intra_pre[graph.community_range(i)];
    let mut zero_in_degree = Vec::new();
    let mut max_rel_err: f64 = 0.0;
    for (x, &d) in degrees.iter().enumerate() {
        if d == 0 {
            zero_in_degree.push(x);
            continue;
        }
        let raw = d as f64 / scale;
        max_rel_err = max_rel_err.max((pi_i[x] / raw - 1.0).abs());
    }
    let total: f64 = degrees.iter().map(|&d| d as f64).sum();
    if total == 0.0 {
        return Err(Error::ZeroMass);
    }
    let approx = degrees.iter().map(|&d| d as f64 / total).collect();
    Ok(InDegreeApprox {
        approx: ProbVector::from_raw(approx, pi_i.domain()),
        max_rel_err,
        zero_in_degree,
    })
}
