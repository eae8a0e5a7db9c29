//! The annealed walk: the graph is revealed along the walk.
//!
//! On its first visit, a vertex draws its out-neighborhood with the same law
//! as the generator (binomial out-degree, distinct targets in its own
//! community, independent rewiring). Later visits reuse what was revealed.
//! Averaged over graphs, the path law of this walk equals the quenched law.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::DbmParams;
use crate::meanfield::MeanFieldKernel;
use crate::rng::SeedTree;
use crate::stats::binomial_stderr;

/// Edge law of the block model in terms of `p` directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealedModel {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub alpha: f64,
}

impl AnnealedModel {
    pub fn new(n: usize, m: usize, p: f64, alpha: f64) -> Result<Self> {
        if n < 2 || m < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2 and m >= 2, got n = {n}, m = {m}")));
        }
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("p = {p} or alpha = {alpha} outside [0, 1]")));
        }
        Ok(Self { n, m, p, alpha })
    }

    pub fn from_params(params: &DbmParams) -> Result<Self> {
        params.validate()?;
        Self::new(params.n, params.m, params.p(), params.alpha)
    }

    pub fn vertex_count(&self) -> usize {
        self.n * self.m
    }

    /// `t <= sqrt(n) / 10`, the range in which the cycle-free approximations
    /// are expected to be accurate.
    pub fn within_short_time(&self, t: usize) -> bool {
        t as f64 <= (self.n as f64).sqrt() / 10.0
    }
}

/// A walk together with the part of the graph it has revealed.
#[derive(Debug, Clone)]
pub struct AnnealedState {
    model: AnnealedModel,
    degree: Binomial,
    revealed: HashMap<usize, Vec<(usize, bool)>>,
    position: usize,
    visited: HashSet<usize>,
    cycle_free: bool,
}

impl AnnealedState {
    pub fn new(model: AnnealedModel, start: usize) -> Result<Self> {
        if start >= model.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: start,
                count: model.vertex_count(),
            });
        }
        let degree = Binomial::new((model.n - 1) as u64, model.p).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Self {
            model,
            degree,
            revealed: HashMap::new(),
            position: start,
            visited: HashSet::from([start]),
            cycle_free: true,
        })
    }

    pub fn position(&self) -> usize {
        self.position
    }

    /// No vertex has been visited twice so far.
    pub fn cycle_free(&self) -> bool {
        self.cycle_free
    }

    pub fn revealed_count(&self) -> usize {
        self.revealed.len()
    }

    /// The out-edges `(target, rewired)` of `v` if already revealed.
    pub fn neighborhood(&self, v: usize) -> Option<&[(usize, bool)]> {
        self.revealed.get(&v).map(Vec::as_slice)
    }

    /// Reveals the out-neighborhood of `v` unless already known.
    pub fn reveal<R: Rng + ?Sized>(&mut self, v: usize, rng: &mut R) -> &[(usize, bool)] {
        let AnnealedModel { n, m, alpha, .. } = self.model;
        let degree = &self.degree;
        self.revealed.entry(v).or_insert_with(|| {
            let (c, x) = (v / n, v % n);
            let d = degree.sample(rng) as usize;
            let picks = index::sample(rng, n - 1, d);
            picks
                .into_iter()
                .map(|l| {
                    let y = if l >= x { l + 1 } else { l };
                    if rng.random::<f64>() < alpha {
                        let k = rng.random_range(0..m - 1);
                        let j = if k >= c { k + 1 } else { k };
                        (j * n + y, true)
                    } else {
                        (c * n + y, false)
                    }
                })
                .collect()
        })
    }

    /// One step: reveal the current vertex if needed, then move to a uniform
    /// out-neighbor. Errors when the current vertex has no out-edges.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        let here = self.position;
        let row = self.reveal(here, rng);
        if row.is_empty() {
            return Err(Error::Sink { vertex: here });
        }
        let next = row[rng.random_range(0..row.len())].0;
        self.position = next;
        if !self.visited.insert(next) {
            self.cycle_free = false;
        }
        Ok(next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnealedPath {
    pub vertices: Vec<usize>,
    /// Whether `X_0, ..., X_t` are pairwise distinct.
    pub cycle_free: bool,
}

/// `t` steps of the annealed walk from `x`.
pub fn annealed_walk<R: Rng + ?Sized>(model: &AnnealedModel, x: usize, t: usize, rng: &mut R) -> Result<AnnealedPath> {
    let mut state = AnnealedState::new(*model, x)?;
    let mut vertices = Vec::with_capacity(t + 1);
    vertices.push(x);
    for _ in 0..t {
        vertices.push(state.step(rng)?);
    }
    Ok(AnnealedPath {
        vertices,
        cycle_free: state.cycle_free,
    })
}

/// Monte Carlo law of the community at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityLaw {
    pub t: usize,
    pub start: usize,
    /// Completed runs; runs stuck at a vertex without out-edges are dropped.
    pub runs: usize,
    pub discarded: usize,
    /// Frequency of `{X_t in V_i, C_t}`.
    pub joint: Vec<f64>,
    pub joint_stderr: Vec<f64>,
    /// Frequency of `{X_t in V_i}`.
    pub marginal: Vec<f64>,
    pub marginal_stderr: Vec<f64>,
    /// `Q^t(c(x), i)`.
    pub q_closed_form: Vec<f64>,
    pub cycle_free_failure_rate: f64,
    pub within_short_time: bool,
}

impl CommunityLaw {
    /// Columns `t,community,frequency,stderr,q_closed_form`, for the joint event.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,community,frequency,stderr,q_closed_form\n");
        for i in 0..self.joint.len() {
            let _ = writeln!(
                out,
                "{},{i},{},{},{}",
                self.t, self.joint[i], self.joint_stderr[i], self.q_closed_form[i]
            );
        }
        out
    }
}

/// Estimates `P_x(X_t in V_i, C_t)` for each community `i` with `reps` runs.
/// Run `r` uses stream `r` of `streams`.
pub fn annealed_community_law(
    model: &AnnealedModel,
    x: usize,
    t: usize,
    reps: usize,
    streams: SeedTree,
) -> Result<CommunityLaw> {
    if t == 0 || reps == 0 {
        return Err(Error::InvalidParameter("community law needs t >= 1 and reps >= 1".into()));
    }
    let m = model.m;
    let outcomes: Vec<Option<(usize, bool)>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = streams.stream(r as u64);
            match annealed_walk(model, x, t, &mut rng) {
                Ok(path) => Ok(Some((path.vertices[t] / model.n, path.cycle_free))),
                Err(Error::Sink { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut joint = vec![0u64; m];
    let mut marginal = vec![0u64; m];
    let mut cycles = 0u64;
    let mut runs = 0usize;
    for (c, free) in outcomes.into_iter().flatten() {
        runs += 1;
        marginal[c] += 1;
        if free {
            joint[c] += 1;
        } else {
            cycles += 1;
        }
    }
    if runs == 0 {
        return Err(Error::ZeroMass);
    }
    let freq = |v: &[u64]| v.iter().map(|&k| k as f64 / runs as f64).collect::<Vec<_>>();
    let joint = freq(&joint);
    let marginal = freq(&marginal);
    let q = MeanFieldKernel::new(m, model.alpha)?;
    Ok(CommunityLaw {
        t,
        start: x,
        runs,
        discarded: reps - runs,
        joint_stderr: joint.iter().map(|&f| binomial_stderr(f, runs)).collect(),
        marginal_stderr: marginal.iter().map(|&f| binomial_stderr(f, runs)).collect(),
        joint,
        marginal,
        q_closed_form: q.power_row(t as u64, x / model.n),
        cycle_free_failure_rate: cycles as f64 / runs as f64,
        within_short_time: model.within_short_time(t),
    })
}

/// Survival curve of the first jump time.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSurvival {
    pub runs: usize,
    pub discarded: usize,
    /// `P(tau_jump > t)` for `t = 0..=t_max`.
    pub survival: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `(1 - alpha)^t`.
    pub theory: Vec<f64>,
    pub within_short_time: bool,
}

impl JumpSurvival {
    /// Columns `t,survival,stderr,theory`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,survival,stderr,theory\n");
        for t in 0..self.survival.len() {
            let _ = writeln!(out, "{t},{},{},{}", self.survival[t], self.stderr[t], self.theory[t]);
        }
        out
    }
}

/// Empirical `P(tau_jump > t)` of the annealed walk started at vertex 0
/// (every start is equivalent under the annealed law).
pub fn annealed_jump_survival(model: &AnnealedModel, t_max: usize, reps: usize, streams: SeedTree) -> Result<JumpSurvival> {
    if reps == 0 {
        return Err(Error::InvalidParameter("jump survival needs reps >= 1".into()));
    }
    let jumps: Vec<usize> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = streams.stream(r as u64);
            let mut state = AnnealedState::new(*model, 0)?;
            for s in 1..=t_max {
                let here = state.position();
                match state.step(&mut rng) {
                    Ok(next) if next / model.n != here / model.n => return Ok(s),
                    Ok(_) => {}
                    Err(Error::Sink { .. }) => return Ok(0),
                    Err(e) => return Err(e),
                }
            }
            Ok(t_max + 1)
        })
        .collect::<Result<_>>()?;
    // 0 marks a stuck run, t_max + 1 a run without a jump
    let stuck = jumps.iter().filter(|&&j| j == 0).count();
    let runs = reps - stuck;
    if runs == 0 {
        return Err(Error::ZeroMass);
    }
    let mut first = vec![0usize; t_max + 2];
    for j in jumps.into_iter().filter(|&j| j > 0) {
        first[j] += 1;
    }
    let mut alive = runs;
    let mut survival = Vec::with_capacity(t_max + 1);
    for &f in first.iter().take(t_max + 1) {
        alive -= f;
        survival.push(alive as f64 / runs as f64);
    }
    Ok(JumpSurvival {
        runs,
        discarded: stuck,
        stderr: survival.iter().map(|&s| binomial_stderr(s, runs)).collect(),
        theory: (0..=t_max).map(|t| (1.0 - model.alpha).powi(t as i32)).collect(),
        survival,
        within_short_time: model.within_short_time(t_max),
    })
}
