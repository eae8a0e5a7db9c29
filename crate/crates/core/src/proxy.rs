//! Proxy equilibrium measures built from short evolutions of uniform measures.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::meanfield::MeanFieldKernel;
use crate::walk::{evolve, tv_distance, Domain, ProbVector};

pub const DEFAULT_EPS: f64 = 0.2;

/// `h = ceil(2 eps t_ent)`, `s = floor((1 - eps) t_ent)`, `t = s + h + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    pub eps: f64,
    pub h_eps: usize,
    pub s_eps: usize,
}

impl EpsilonSchedule {
    pub fn new(eps: f64, t_ent: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
        }
        if !(t_ent > 0.0 && t_ent.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_ent = {t_ent} must be positive")));
        }
        Ok(Self {
            eps,
            h_eps: (2.0 * eps * t_ent).ceil() as usize,
            s_eps: ((1.0 - eps) * t_ent).floor() as usize,
        })
    }

    pub fn total(&self) -> usize {
        self.s_eps + self.h_eps + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NuMeasures {
    /// `nu_i = sum_k Q^{s+1}(i, k) U_k P^h` with `U_k` uniform on `V_k`.
    pub nu_i: Vec<ProbVector>,
    /// `U P^h` with `U` uniform on all vertices.
    pub nu: ProbVector,
    pub schedule: EpsilonSchedule,
}

pub fn nu_measures(graph: &Digraph, schedule: &EpsilonSchedule, alpha: f64) -> Result<NuMeasures> {
    let (n, m) = (graph.width(), graph.community_count());
    let q = MeanFieldKernel::new(m, alpha)?;
    let count = graph.vertex_count();
    let evolved: Vec<ProbVector> = (0..m)
        .into_par_iter()
        .map(|k| {
            let mut u = vec![0.0; count];
            u[graph.community_range(k)].fill(1.0 / n as f64);
            evolve(graph, &ProbVector::new(u, Domain::Global)?, schedule.h_eps)
        })
        .collect::<Result<_>>()?;
    let nu_i = (0..m)
        .map(|i| {
            let weights = q.power_row(schedule.s_eps as u64 + 1, i);
            let mut mix = vec![0.0; count];
            for (w, e) in weights.iter().zip(&evolved) {
                for (a, b) in mix.iter_mut().zip(e.values()) {
                    *a += w * b;
                }
            }
            ProbVector::new(mix, Domain::Global)
        })
        .collect::<Result<_>>()?;
    let nu = evolve(graph, &ProbVector::uniform(count, Domain::Global), schedule.h_eps)?;
    Ok(NuMeasures {
        nu_i,
        nu,
        schedule: *schedule,
    })
}

/// `max_i TV(nu_i, nu)`.
pub fn nu_spread(measures: &NuMeasures) -> Result<f64> {
    measures
        .nu_i
        .iter()
        .map(|v| tv_distance(v, &measures.nu))
        .try_fold(0.0, |acc, d| d.map(|d| f64::max(acc, d)))
}

/// Columns `i,tv_to_nu,tv_nu_to_pi,eps,h_eps,s_eps`, one row per community.
pub fn proxy_csv(measures: &NuMeasures, pi: &ProbVector) -> Result<String> {
    let s = &measures.schedule;
    let to_pi = tv_distance(&measures.nu, pi)?;
    let mut out = String::from("i,tv_to_nu,tv_nu_to_pi,eps,h_eps,s_eps\n");
    for (i, v) in measures.nu_i.iter().enumerate() {
        let d = tv_distance(v, &measures.nu)?;
        let _ = writeln!(out, "{i},{d},{to_pi},{},{},{}", s.eps, s.h_eps, s.s_eps);
    }
    Ok(out)
}
