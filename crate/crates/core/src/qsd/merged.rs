use rand::seq::index;
use rayon::prelude::*;

use super::CommunityView;
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::rng::SeedTree;
use crate::walk::{Domain, ProbVector};

/// The walk on `G_i` with all gates collapsed into one boundary state.
///
/// States `0..k` are the non-gate vertices in ascending label order and
/// state `k` is the boundary. Leaving the boundary, the walk picks a gate
/// with probability proportional to `pi_i` and steps from it.
#[derive(Debug, Clone)]
pub struct MergedKernel {
    community: usize,
    survivors: Vec<usize>,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    weights: Vec<f64>,
    pi_tilde: ProbVector,
}

impl MergedKernel {
    pub fn from_view(view: &CommunityView, pi_i: &ProbVector) -> Result<Self> {
        view.check_local(pi_i)?;
        if view.gates().is_empty() {
            return Err(Error::NoGates(view.community()));
        }
        let survivors = view.survivors();
        let k = survivors.len();
        let mut state = vec![k as u32; view.width()];
        for (s, &x) in survivors.iter().enumerate() {
            state[x] = s as u32;
        }
        let sub = view.subgraph();

        let mut offsets = Vec::with_capacity(k + 2);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        let mut acc = vec![0.0; k + 1];
        let mut touched: Vec<u32> = Vec::new();
        let flush = |acc: &mut [f64], touched: &mut Vec<u32>, cols: &mut Vec<u32>, weights: &mut Vec<f64>| {
            touched.sort_unstable();
            for &c in touched.iter() {
                cols.push(c);
                weights.push(acc[c as usize]);
                acc[c as usize] = 0.0;
            }
            touched.clear();
        };
        let add = |acc: &mut [f64], touched: &mut Vec<u32>, c: u32, w: f64| {
            if acc[c as usize] == 0.0 {
                touched.push(c);
            }
            acc[c as usize] += w;
        };

        for &x in &survivors {
            offsets.push(cols.len());
            let row = sub.out_neighbors(x);
            if row.is_empty() {
                return Err(Error::Sink {
                    vertex: x + view.offset,
                });
            }
            let share = 1.0 / row.len() as f64;
            for &y in row {
                add(&mut acc, &mut touched, state[y as usize], share);
            }
            flush(&mut acc, &mut touched, &mut cols, &mut weights);
        }

        let gate_mass: f64 = view.gates().iter().map(|&z| pi_i[z]).sum();
        if gate_mass <= 0.0 {
            return Err(Error::ZeroMass);
        }
        offsets.push(cols.len());
        for &z in view.gates() {
            let row = sub.out_neighbors(z);
            let share = pi_i[z] / gate_mass / row.len() as f64;
            if share == 0.0 {
                continue;
            }
            for &y in row {
                add(&mut acc, &mut touched, state[y as usize], share);
            }
        }
        flush(&mut acc, &mut touched, &mut cols, &mut weights);
        offsets.push(cols.len());

        let mut pi_tilde: Vec<f64> = survivors.iter().map(|&x| pi_i[x]).collect();
        pi_tilde.push(gate_mass);
        Ok(Self {
            community: view.community(),
            survivors,
            offsets,
            cols,
            weights,
            pi_tilde: ProbVector::from_raw(pi_tilde, Domain::Merged(view.community())),
        })
    }

    pub fn community(&self) -> usize {
        self.community
    }

    pub fn state_count(&self) -> usize {
        self.survivors.len() + 1
    }

    pub fn boundary(&self) -> usize {
        self.survivors.len()
    }

    /// Local label of a non-boundary state.
    pub fn vertex_of(&self, state: usize) -> Option<usize> {
        self.survivors.get(state).copied()
    }

    /// `(targets, probabilities)` of one row, targets ascending.
    pub fn row(&self, state: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[state]..self.offsets[state + 1];
        (&self.cols[r.clone()], &self.weights[r])
    }

    /// `pi_i` off the boundary and `pi_i(G_i)` on it.
    pub fn pi_tilde(&self) -> &ProbVector {
        &self.pi_tilde
    }

    pub fn boundary_mass(&self) -> f64 {
        self.pi_tilde[self.boundary()]
    }

    pub fn step(&self, src: &[f64], dst: &mut [f64]) {
        dst.fill(0.0);
        for (x, &w) in src.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let (cols, probs) = self.row(x);
            for (&y, &p) in cols.iter().zip(probs) {
                dst[y as usize] += w * p;
            }
        }
    }

    /// `||pi~ P~ - pi~||_1`.
    pub fn stationarity_residual(&self) -> f64 {
        let mut next = vec![0.0; self.state_count()];
        self.step(self.pi_tilde.values(), &mut next);
        next.iter().zip(self.pi_tilde.values()).map(|(a, b)| (a - b).abs()).sum()
    }

    fn tv_to_pi(&self, mu: &[f64]) -> f64 {
        0.5 * mu.iter().zip(self.pi_tilde.values()).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Steps until `TV(P~^t(x, .), pi~) <= threshold`, or `None` past `cap`.
    fn first_time_within(&self, x: usize, threshold: f64, cap: usize) -> Option<usize> {
        let mut cur = vec![0.0; self.state_count()];
        let mut next = vec![0.0; self.state_count()];
        cur[x] = 1.0;
        for t in 0..=cap {
            if self.tv_to_pi(&cur) <= threshold {
                return Some(t);
            }
            self.step(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        None
    }
}

/// The merged kernel of community `i` for the local stationary measure `pi_i`.
pub fn build_merged_kernel(graph: &Digraph, i: usize, pi_i: &ProbVector) -> Result<MergedKernel> {
    MergedKernel::from_view(&CommunityView::new(graph, i)?, pi_i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixingTime {
    pub t_mix: usize,
    /// Whether every state was used as a start. Otherwise the value is a
    /// lower estimate of the true maximum.
    pub exact: bool,
    pub starts: usize,
}

/// Least `t` with `max_x TV(P~^t(x, .), pi~) <= 1/(2e)`.
///
/// Distance to stationarity is non-increasing along each row, so this is
/// the largest per-start first passage below the threshold. All states are
/// used up to `exact_limit` states; beyond that, `sampled` uniform states
/// plus the boundary.
pub fn mixing_time_estimate(
    kernel: &MergedKernel,
    exact_limit: usize,
    sampled: usize,
    cap: usize,
    streams: SeedTree,
) -> Result<MixingTime> {
    let count = kernel.state_count();
    let exact = count <= exact_limit || sampled >= count;
    let starts: Vec<usize> = if exact {
        (0..count).collect()
    } else {
        let mut s = index::sample(&mut streams.rng(), count - 1, sampled).into_vec();
        s.push(kernel.boundary());
        s.sort_unstable();
        s
    };
    let threshold = 1.0 / (2.0 * std::f64::consts::E);
    let times: Option<Vec<usize>> = starts
        .par_iter()
        .map(|&x| kernel.first_time_within(x, threshold, cap))
        .collect();
    match times {
        Some(t) => Ok(MixingTime {
            t_mix: t.into_iter().max().unwrap_or(0),
            exact,
            starts: starts.len(),
        }),
        None => Err(Error::NotConverged {
            what: "merged-kernel mixing time",
            iterations: cap,
            residual: f64::NAN,
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMass {
    /// `1 + sum_{t=1}^{floor(T~)} P~^t(boundary, boundary)`.
    pub r_tilde: f64,
    /// `t_mix ln(1 / min pi~)`.
    pub t_tilde: f64,
    pub horizon: usize,
}

pub fn return_mass(kernel: &MergedKernel, t_mix: usize) -> ReturnMass {
    let min_pi = kernel.pi_tilde.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let t_tilde = t_mix as f64 * (1.0 / min_pi).ln();
    let horizon = t_tilde.floor() as usize;
    let b = kernel.boundary();
    let mut cur = vec![0.0; kernel.state_count()];
    let mut next = vec![0.0; kernel.state_count()];
    cur[b] = 1.0;
    let mut r_tilde = 1.0;
    for _ in 0..horizon {
        kernel.step(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        r_tilde += cur[b];
    }
    ReturnMass {
        r_tilde,
        t_tilde,
        horizon,
    }
}
