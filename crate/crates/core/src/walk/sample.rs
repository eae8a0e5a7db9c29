use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::rng::SeedTree;
use crate::stats;

/// A sampled path of the quenched walk.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub vertices: Vec<usize>,
    /// `sum_s ln P(X_s, X_{s+1}) = -sum_s ln D+(X_s)`.
    pub log_mass: f64,
    /// First step index `t` with `c(X_t) != c(X_{t-1})`.
    pub jump_time: Option<usize>,
}

#[inline]
fn uniform_step<R: Rng + ?Sized>(graph: &Digraph, x: usize, rng: &mut R) -> Result<usize> {
    let row = graph.out_neighbors(x);
    if row.is_empty() {
        return Err(Error::Sink { vertex: x });
    }
    Ok(row[rng.random_range(0..row.len())] as usize)
}

/// Runs `t` steps from `x`, each uniform over the current out-neighbors.
pub fn sample_trajectory<R: Rng + ?Sized>(graph: &Digraph, x: usize, t: usize, rng: &mut R) -> Result<Trajectory> {
    graph.check_vertex(x)?;
    let mut vertices = Vec::with_capacity(t + 1);
    vertices.push(x);
    let mut log_mass = 0.0;
    let mut jump_time = None;
    let mut cur = x;
    for s in 1..=t {
        log_mass -= (graph.out_degree(cur) as f64).ln();
        let next = uniform_step(graph, cur, rng)?;
        if jump_time.is_none() && graph.community(next) != graph.community(cur) {
            jump_time = Some(s);
        }
        vertices.push(next);
        cur = next;
    }
    Ok(Trajectory {
        vertices,
        log_mass,
        jump_time,
    })
}

/// Samples of `-ln m(path) / (H t)` with summary quantiles.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMassSummary {
    pub ratios: Vec<f64>,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
}

impl PathMassSummary {
    pub fn fraction_within(&self, lo: f64, hi: f64) -> f64 {
        self.ratios.iter().filter(|&&r| (lo..=hi).contains(&r)).count() as f64 / self.ratios.len() as f64
    }
}

/// Runs `reps` trajectories of length `t` from each start and normalizes
/// their log-mass by the entropy `h`. Replica `r` of start `k` uses stream
/// `k * reps + r` of `streams`.
pub fn path_mass_lln(
    graph: &Digraph,
    starts: &[usize],
    t: usize,
    reps: usize,
    h: f64,
    streams: SeedTree,
) -> Result<PathMassSummary> {
    if t == 0 || !(h > 0.0) {
        return Err(Error::InvalidParameter("path mass needs t >= 1 and H > 0".into()));
    }
    if starts.is_empty() || reps == 0 {
        return Err(Error::InvalidParameter("path mass needs at least one sample".into()));
    }
    let ratios = (0..starts.len() * reps)
        .into_par_iter()
        .map(|task| {
            let mut rng = streams.stream(task as u64);
            let path = sample_trajectory(graph, starts[task / reps], t, &mut rng)?;
            Ok(-path.log_mass / (h * t as f64))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(PathMassSummary {
        median: stats::quantile_sorted(&sorted, 0.5),
        q05: stats::quantile_sorted(&sorted, 0.05),
        q95: stats::quantile_sorted(&sorted, 0.95),
        ratios,
    })
}

/// Outcome of a first-jump simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpTime {
    /// The walk first changed community at `step`, landing on `vertex`.
    At { step: u64, vertex: usize },
    /// No jump within the horizon.
    Censored { horizon: u64 },
}

impl JumpTime {
    pub fn step(&self) -> Option<u64> {
        match *self {
            JumpTime::At { step, .. } => Some(step),
            JumpTime::Censored { .. } => None,
        }
    }
}

/// `20 / alpha` steps, or `10^6` when `alpha = 0`. An `Exp(1)` variable
/// exceeds 20 with probability below `10^-8`.
pub fn default_jump_horizon(alpha: f64) -> u64 {
    if alpha > 0.0 {
        (20.0 / alpha).ceil() as u64
    } else {
        1_000_000
    }
}

/// First time `t > 0` with `c(X_t) != c(X_{t-1})`, or censoring at `horizon`.
pub fn sample_tau_jump<R: Rng + ?Sized>(graph: &Digraph, x: usize, horizon: u64, rng: &mut R) -> Result<JumpTime> {
    graph.check_vertex(x)?;
    if horizon == 0 {
        return Err(Error::InvalidParameter("jump horizon must be at least 1".into()));
    }
    let mut cur = x;
    for step in 1..=horizon {
        let next = uniform_step(graph, cur, rng)?;
        if graph.community(next) != graph.community(cur) {
            return Ok(JumpTime::At { step, vertex: next });
        }
        cur = next;
    }
    Ok(JumpTime::Censored { horizon })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circulant(n: usize, k: usize) -> Digraph {
        let edges: Vec<_> = (0..n).flat_map(|v| (1..=k).map(move |s| (v, (v + s) % n))).collect();
        Digraph::simple(n, &edges).unwrap()
    }

    #[test]
    fn cycle_is_deterministic() {
        let g = circulant(5, 1);
        let mut rng = SeedTree::new(1).rng();
        let tr = sample_trajectory(&g, 3, 7, &mut rng).unwrap();
        assert_eq!(tr.vertices, vec![3, 4, 0, 1, 2, 3, 4, 0]);
        assert_eq!(tr.log_mass, 0.0);
        assert_eq!(tr.jump_time, None);
    }

    #[test]
    fn regular_log_mass() {
        let g = circulant(20, 4);
        let mut rng = SeedTree::new(2).rng();
        let tr = sample_trajectory(&g, 0, 9, &mut rng).unwrap();
        assert!((tr.log_mass + 9.0 * 4f64.ln()).abs() < 1e-12);
        let lln = path_mass_lln(&g, &[0, 5], 6, 10, 2f64.ln(), SeedTree::new(3)).unwrap();
        assert!(lln.ratios.iter().all(|r| (r - 2.0).abs() < 1e-12));
    }

    #[test]
    fn one_step_ratio() {
        // vertex 0 has degree 3
        let g = Digraph::simple(4, &[(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (3, 0)]).unwrap();
        let h = 0.7;
        let lln = path_mass_lln(&g, &[0], 1, 5, h, SeedTree::new(4)).unwrap();
        assert!(lln.ratios.iter().all(|r| (r - 3f64.ln() / h).abs() < 1e-12));
    }

    #[test]
    fn jump_time_in_block_graph() {
        // two communities of width 2; only vertex 1 has a rewired edge
        let g = Digraph::new(2, 2, vec![(0, 1, false), (1, 0, false), (1, 3, true), (3, 2, false), (2, 3, false)])
            .unwrap();
        let mut rng = SeedTree::new(5).rng();
        for _ in 0..50 {
            match sample_tau_jump(&g, 0, 1000, &mut rng).unwrap() {
                JumpTime::At { step, vertex } => {
                    assert_eq!(vertex, 3);
                    assert_eq!(step % 2, 0);
                }
                JumpTime::Censored { .. } => panic!("jump should happen"),
            }
        }
        assert_eq!(
            sample_tau_jump(&g, 2, 30, &mut rng).unwrap(),
            JumpTime::Censored { horizon: 30 }
        );
        let tr = sample_trajectory(&g, 1, 40, &mut rng).unwrap();
        if let Some(s) = tr.jump_time {
            assert_ne!(g.community(tr.vertices[s]), g.community(tr.vertices[s - 1]));
        }
    }

    #[test]
    fn horizons() {
        assert_eq!(default_jump_horizon(0.0), 1_000_000);
        assert_eq!(default_jump_horizon(0.002), 10_000);
    }
}
