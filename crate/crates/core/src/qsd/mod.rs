//! Gates, quasi-stationary distributions and hitting times of one community.
//!
//! Everything here works on the pre-rewiring graph `G_i` with local labels
//! `0..n`. Killing the walk on the gate set gives the sub-Markovian kernel
//! `[P_i]_G`, whose dominant left eigenvector is the quasi-stationary
//! distribution `mu*` and whose eigenvalue is `1 - iota`.

mod merged;
mod restart;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{DbmParams, Digraph};
use crate::rng::SeedTree;
use crate::walk::{local_stationary, restrict_normalize, Domain, ProbVector};

pub use merged::{build_merged_kernel, mixing_time_estimate, return_mass, MergedKernel, MixingTime, ReturnMass};
pub use restart::{
    jump_target_frequencies, restart_csv, restart_process, JumpTargets, RestartOptions, RestartSample,
};

/// Community `i` as seen from inside: `G_i`, its gates and rewired degrees.
#[derive(Debug, Clone)]
pub struct CommunityView {
    community: usize,
    offset: usize,
    sub: Digraph,
    is_gate: Vec<bool>,
    gates: Vec<usize>,
    rewired_out: Vec<u32>,
}

impl CommunityView {
    pub fn new(graph: &Digraph, i: usize) -> Result<Self> {
        let sub = graph.pre_rewiring_subgraph(i)?;
        let range = graph.community_range(i);
        let rewired_out: Vec<u32> = range
            .clone()
            .map(|v| graph.out_flags(v).iter().filter(|&&r| r).count() as u32)
            .collect();
        let is_gate: Vec<bool> = rewired_out.iter().map(|&o| o > 0).collect();
        let gates = (0..is_gate.len()).filter(|&x| is_gate[x]).collect();
        Ok(Self {
            community: i,
            offset: range.start,
            sub,
            is_gate,
            gates,
            rewired_out,
        })
    }

    pub fn community(&self) -> usize {
        self.community
    }

    pub fn width(&self) -> usize {
        self.is_gate.len()
    }

    /// `G_i` on local labels.
    pub fn subgraph(&self) -> &Digraph {
        &self.sub
    }

    /// Local labels of the gates, ascending.
    pub fn gates(&self) -> &[usize] {
        &self.gates
    }

    pub fn global_gates(&self) -> Vec<usize> {
        self.gates.iter().map(|&x| x + self.offset).collect()
    }

    pub fn is_gate(&self, x: usize) -> bool {
        self.is_gate[x]
    }

    pub fn out_degree(&self, x: usize) -> usize {
        self.sub.out_degree(x)
    }

    pub fn rewired_out(&self, x: usize) -> u32 {
        self.rewired_out[x]
    }

    pub fn survivors(&self) -> Vec<usize> {
        (0..self.width()).filter(|&x| !self.is_gate[x]).collect()
    }

    fn domain(&self) -> Domain {
        Domain::Community(self.community)
    }

    fn check_local(&self, mu: &ProbVector) -> Result<()> {
        if mu.len() != self.width() {
            return Err(Error::DomainMismatch {
                expected: format!("{} entries", self.width()),
                found: format!("{} entries ({})", mu.len(), mu.domain()),
            });
        }
        Ok(())
    }

    /// `dst = src [P_i]_G`: one step of `G_i` with mass entering a gate
    /// discarded. Returns the surviving mass.
    pub(crate) fn killed_step(&self, src: &[f64], dst: &mut [f64]) -> f64 {
        dst.fill(0.0);
        for (x, &w) in src.iter().enumerate() {
            if w == 0.0 || self.is_gate[x] {
                continue;
            }
            let row = self.sub.out_neighbors(x);
            if row.is_empty() {
                continue;
            }
            let share = w / row.len() as f64;
            for &y in row {
                if !self.is_gate[y as usize] {
                    dst[y as usize] += share;
                }
            }
        }
        dst.iter().sum()
    }

    /// One unkilled step of `P_i` on local labels.
    pub(crate) fn step(&self, src: &[f64], dst: &mut [f64]) -> Result<()> {
        crate::walk::push_step(&self.sub, src, dst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QsdOptions {
    /// Eigenvalue changes below this count as stable.
    pub eigen_tolerance: f64,
    /// Consecutive stable iterations required.
    pub stable_iterations: usize,
    /// Required `||mu K - (1 - iota) mu||_1` at exit.
    pub residual_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for QsdOptions {
    fn default() -> Self {
        Self {
            eigen_tolerance: 1e-13,
            stable_iterations: 50,
            residual_tolerance: 1e-12,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Qsd {
    /// On local labels, zero on the gates.
    pub mu_star: ProbVector,
    pub iota: f64,
    /// `||mu* [P_i]_G - (1 - iota) mu*||_1`.
    pub geometric_residual: f64,
    pub iterations: usize,
    /// Sizes of the strongly connected components with a cycle inside the
    /// survivor set.
    pub survivor_components: Vec<usize>,
    /// More than one such component: `mu*` then lives on the dominant one
    /// and whatever it feeds.
    pub reducible: bool,
}

/// Quasi-stationary distribution of the walk on `G_i` killed at the gates.
///
/// Power iteration on the lazy kernel `(K + I) / 2` with L1 renormalization;
/// the lazy version has the same eigenvector and no periodicity trouble.
pub fn quasi_stationary(view: &CommunityView, opts: &QsdOptions) -> Result<Qsd> {
    let n = view.width();
    if view.gates.is_empty() {
        return Err(Error::NoGates(view.community));
    }
    let survivors = view.survivors();
    if survivors.is_empty() {
        return Err(Error::EmptyComplement(view.community));
    }
    let mask: Vec<bool> = view.is_gate.iter().map(|g| !g).collect();
    let comps = view.sub.components(Some(&mask));
    let survivor_components: Vec<usize> = comps.nontrivial().map(|c| comps.sizes[c]).collect();

    let mut cur = vec![0.0; n];
    for &x in &survivors {
        cur[x] = 1.0 / survivors.len() as f64;
    }
    let mut stepped = vec![0.0; n];
    let mut previous = f64::NAN;
    let mut stable = 0;
    let mut residual = f64::INFINITY;
    for iteration in 0..opts.max_iterations {
        let theta = view.killed_step(&cur, &mut stepped);
        if theta <= 0.0 {
            return Err(Error::ZeroMass);
        }
        if (theta - previous).abs() < opts.eigen_tolerance {
            stable += 1;
        } else {
            stable = 0;
        }
        previous = theta;
        if stable >= opts.stable_iterations {
            residual = cur.iter().zip(&stepped).map(|(c, s)| (s - theta * c).abs()).sum();
            if residual < opts.residual_tolerance {
                return Ok(Qsd {
                    mu_star: ProbVector::from_raw(cur, view.domain()),
                    iota: 1.0 - theta,
                    geometric_residual: residual,
                    iterations: iteration,
                    reducible: survivor_components.len() > 1,
                    survivor_components,
                });
            }
        }
        let mut mass = 0.0;
        for (c, s) in cur.iter_mut().zip(&stepped) {
            *c = 0.5 * (*c + s);
            mass += *c;
        }
        cur.iter_mut().for_each(|c| *c /= mass);
    }
    Err(Error::NotConverged {
        what: "quasi-stationary power iteration",
        iterations: opts.max_iterations,
        residual,
    })
}

/// `P_mu(tau_G > t)` for `t = 0..=t_max`, by evolving the killed walk.
pub fn survival_curve(view: &CommunityView, mu: &ProbVector, t_max: usize) -> Result<Vec<f64>> {
    view.check_local(mu)?;
    let mut cur: Vec<f64> = mu
        .values()
        .iter()
        .enumerate()
        .map(|(x, &w)| if view.is_gate[x] { 0.0 } else { w })
        .collect();
    let mut next = vec![0.0; cur.len()];
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(cur.iter().sum());
    for _ in 0..t_max {
        out.push(view.killed_step(&cur, &mut next));
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(out)
}

/// Exact `E_mu[tau_G]` as `sum_t P_mu(tau_G > t)`, the Neumann series of
/// `h = 1 + [P_i]_G h` paired with `mu`. Errors when the survival mass does
/// not drain, which happens when some survivors cannot reach a gate.
pub fn expected_hitting_time(view: &CommunityView, mu: &ProbVector) -> Result<f64> {
    view.check_local(mu)?;
    const MAX_STEPS: usize = 10_000_000;
    let mut cur: Vec<f64> = mu
        .values()
        .iter()
        .enumerate()
        .map(|(x, &w)| if view.is_gate[x] { 0.0 } else { w })
        .collect();
    let mut next = vec![0.0; cur.len()];
    let mut mass: f64 = cur.iter().sum();
    let mut total: f64 = 0.0;
    for _ in 0..MAX_STEPS {
        if mass <= 1e-16 * total.max(1.0) {
            return Ok(total);
        }
        total += mass;
        mass = view.killed_step(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Err(Error::NotConverged {
        what: "hitting time series",
        iterations: MAX_STEPS,
        residual: mass,
    })
}

/// Distributions on gates seen from `pi_i` and from `mu*`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMeasures {
    /// `pi_i` conditioned on the gates.
    pub mu_g: ProbVector,
    /// One step of `P_i` from `mu_g`.
    pub mu_g_out: ProbVector,
    /// Law of the first gate hit from `mu*`, which is `mu* P_i` restricted
    /// to the gates and normalized.
    pub mu_g_in: ProbVector,
}

pub fn gate_measures(view: &CommunityView, pi_i: &ProbVector, mu_star: &ProbVector) -> Result<GateMeasures> {
    view.check_local(pi_i)?;
    view.check_local(mu_star)?;
    if view.gates.is_empty() {
        return Err(Error::NoGates(view.community));
    }
    let mu_g = restrict_normalize(pi_i, &view.gates)?;
    let mut out = vec![0.0; view.width()];
    view.step(mu_g.values(), &mut out)?;
    let survivors_only: Vec<f64> = mu_star
        .values()
        .iter()
        .enumerate()
        .map(|(x, &w)| if view.is_gate[x] { 0.0 } else { w })
        .collect();
    let mut entered = vec![0.0; view.width()];
    view.step(&survivors_only, &mut entered)?;
    let mu_g_in = restrict_normalize(&ProbVector::from_raw(entered, view.domain()), &view.gates)?;
    Ok(GateMeasures {
        mu_g,
        mu_g_out: ProbVector::from_raw(out, view.domain()),
        mu_g_in,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NiceGates {
    /// Global ids of gates with one rewired edge and out-degree within
    /// `(1 +- eps) lambda ln n`.
    pub nice: Vec<usize>,
    /// Global ids of gates with at least two rewired edges.
    pub bad: Vec<usize>,
    pub nice_fraction: f64,
    pub bad_fraction: f64,
}

/// `ln(n)^{-1/2}`, the tolerance used for nice gates.
pub fn default_nice_eps(n: usize) -> f64 {
    (n as f64).ln().powf(-0.5)
}

pub fn nice_gates(graph: &Digraph, params: &DbmParams, i: usize, eps: f64) -> Result<NiceGates> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
    }
    let scale = params.degree_scale();
    let (lo, hi) = ((1.0 - eps) * scale, (1.0 + eps) * scale);
    let gates = graph.gates(i)?;
    let mut nice = Vec::new();
    let mut bad = Vec::new();
    for &v in &gates {
        let rewired = graph.out_flags(v).iter().filter(|&&r| r).count();
        let d = graph.out_degree(v) as f64;
        if rewired >= 2 {
            bad.push(v);
        } else if (lo..=hi).contains(&d) {
            nice.push(v);
        }
    }
    let total = gates.len().max(1) as f64;
    Ok(NiceGates {
        nice_fraction: nice.len() as f64 / total,
        bad_fraction: bad.len() as f64 / total,
        nice,
        bad,
    })
}

/// Settings for [`analyze_community`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub qsd: QsdOptions,
    /// Exact mixing time and hitting oracle up to this many states.
    pub exact_limit: usize,
    /// Uniform starts for the sampled mixing-time estimate.
    pub sampled_starts: usize,
    /// Give up on the merged-kernel mixing time after this many steps.
    pub t_mix_cap: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            qsd: QsdOptions::default(),
            exact_limit: 2000,
            sampled_starts: 64,
            t_mix_cap: 100_000,
        }
    }
}

/// Everything the gate analysis reports for one community.
#[derive(Debug, Clone, PartialEq)]
pub struct QsdResult {
    pub community: usize,
    /// Global ids.
    pub gates: Vec<usize>,
    pub mu_star: ProbVector,
    pub iota: f64,
    pub geometric_residual: f64,
    pub reducible: bool,
    /// `lambda alpha ln n`, the first-order prediction for `iota`.
    pub lambda_alpha_logn: f64,
    /// `pi_i(G_i)`.
    pub gate_mass: f64,
    pub r_tilde: f64,
    pub t_tilde: f64,
    pub t_mix_estimate: usize,
    /// False when the mixing time came from sampled starts (a lower estimate).
    pub t_mix_exact: bool,
    /// `R~ / pi~(boundary)`.
    pub hitting_estimate: f64,
    /// Exact `E_{pi_i}[tau_G]` when the community is small enough.
    pub hitting_oracle: Option<f64>,
    pub nice_fraction: f64,
}

impl QsdResult {
    pub const CSV_HEADER: &'static str =
        "i,iota,lambda_alpha_logn,r_tilde,t_mix,hitting_estimate,hitting_oracle,gate_count,nice_fraction";

    pub fn csv_row(&self) -> String {
        let oracle = self.hitting_oracle.map(|h| h.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.community,
            self.iota,
            self.lambda_alpha_logn,
            self.r_tilde,
            self.t_mix_estimate,
            self.hitting_estimate,
            oracle,
            self.gates.len(),
            self.nice_fraction
        )
    }
}

pub fn qsd_csv(results: &[QsdResult]) -> String {
    let mut out = String::from(QsdResult::CSV_HEADER);
    out.push('\n');
    for r in results {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

/// Runs the whole gate pipeline on community `i`: local stationary measure,
/// quasi-stationary distribution, merged kernel, mixing time, return mass,
/// hitting-time estimate and (for small communities) the exact hitting time.
pub fn analyze_community(
    graph: &Digraph,
    params: &DbmParams,
    i: usize,
    opts: &AnalysisOptions,
    streams: SeedTree,
) -> Result<QsdResult> {
    let view = CommunityView::new(graph, i)?;
    let qsd = quasi_stationary(&view, &opts.qsd)?;
    let pi_i = local_stationary(graph, i)?.pi;
    let kernel = MergedKernel::from_view(&view, &pi_i)?;
    let mixing = mixing_time_estimate(&kernel, opts.exact_limit, opts.sampled_starts, opts.t_mix_cap, streams)?;
    let ret = return_mass(&kernel, mixing.t_mix);
    let hitting_oracle = if view.width() <= opts.exact_limit {
        Some(expected_hitting_time(&view, &pi_i)?)
    } else {
        None
    };
    let nice = nice_gates(graph, params, i, default_nice_eps(params.n))?;
    Ok(QsdResult {
        community: i,
        gates: view.global_gates(),
        mu_star: qsd.mu_star,
        iota: qsd.iota,
        geometric_residual: qsd.geometric_residual,
        reducible: qsd.reducible,
        lambda_alpha_logn: params.degree_scale() * params.alpha,
        gate_mass: kernel.boundary_mass(),
        r_tilde: ret.r_tilde,
        t_tilde: ret.t_tilde,
        t_mix_estimate: mixing.t_mix,
        t_mix_exact: mixing.exact,
        hitting_estimate: ret.r_tilde / kernel.boundary_mass(),
        hitting_oracle,
        nice_fraction: nice.nice_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Complete digraph on `d + 1` vertices of one community; vertex 0 gets
    /// a rewired edge to the second community instead of its edge to 1.
    pub(crate) fn complete_with_gate(d: usize) -> Digraph {
        let w = d + 1;
        let mut edges = Vec::new();
        for a in 0..w {
            for b in 0..w {
                if a != b {
                    let rewired = a == 0 && b == 1;
                    let (src, dst) = if rewired { (a, w + b) } else { (a, b) };
                    edges.push((src, dst, rewired));
                }
            }
            // second community: a plain complete digraph
            for b in 0..w {
                if a != b {
                    edges.push((w + a, w + b, false));
                }
            }
        }
        Digraph::new(w, 2, edges).unwrap()
    }

    #[test]
    fn view_of_single_gate() {
        let g = complete_with_gate(4);
        let v = CommunityView::new(&g, 0).unwrap();
        assert_eq!(v.gates(), &[0]);
        assert_eq!(v.rewired_out(0), 1);
        assert_eq!(v.out_degree(0), 4);
        assert_eq!(v.global_gates(), vec![0]);
        let v1 = CommunityView::new(&g, 1).unwrap();
        assert!(v1.gates().is_empty());
        assert!(matches!(quasi_stationary(&v1, &QsdOptions::default()), Err(Error::NoGates(1))));
    }

    #[test]
    fn complete_graph_qsd() {
        // survivors 1..=d; each sees the gate with probability 1/d
        let d = 6;
        let g = complete_with_gate(d);
        let v = CommunityView::new(&g, 0).unwrap();
        let q = quasi_stationary(&v, &QsdOptions::default()).unwrap();
        assert!((q.iota - 1.0 / d as f64).abs() < 1e-13);
        assert_eq!(q.mu_star[0], 0.0);
        for x in 1..=d {
            assert!((q.mu_star[x] - 1.0 / d as f64).abs() < 1e-13);
        }
        assert!(q.geometric_residual < 1e-12);
        assert!(!q.reducible);
        let s = survival_curve(&v, &q.mu_star, 20).unwrap();
        for (t, p) in s.iter().enumerate() {
            assert!((p - (1.0 - q.iota).powi(t as i32)).abs() < 1e-12);
        }
        let h = expected_hitting_time(&v, &q.mu_star).unwrap();
        assert!((h - d as f64).abs() < 1e-9);
    }

    #[test]
    fn all_gates_is_empty_complement() {
        // two vertices, each with a rewired edge
        let g = Digraph::new(2, 2, vec![(0, 3, true), (1, 2, true), (2, 3, false), (3, 2, false)]).unwrap();
        let v = CommunityView::new(&g, 0).unwrap();
        assert!(matches!(
            quasi_stationary(&v, &QsdOptions::default()),
            Err(Error::EmptyComplement(0))
        ));
    }

    #[test]
    fn gate_measures_single_gate() {
        let g = complete_with_gate(5);
        let v = CommunityView::new(&g, 0).unwrap();
        let pi = local_stationary(&g, 0).unwrap().pi;
        let q = quasi_stationary(&v, &QsdOptions::default()).unwrap();
        let m = gate_measures(&v, &pi, &q.mu_star).unwrap();
        assert_eq!(m.mu_g.values()[0], 1.0);
        assert!((m.mu_g_in.values()[0] - 1.0).abs() < 1e-15);
        assert!((m.mu_g_out.mass() - 1.0).abs() < 1e-15);
        assert_eq!(m.mu_g_out[0], 0.0);
    }

    #[test]
    fn hitting_time_of_pi_on_complete_graph() {
        // from pi (uniform), tau = 0 w.p. 1/(d+1), else Geometric(1/d)
        let d = 5;
        let g = complete_with_gate(d);
        let v = CommunityView::new(&g, 0).unwrap();
        let pi = ProbVector::uniform(d + 1, Domain::Community(0));
        let h = expected_hitting_time(&v, &pi).unwrap();
        assert!((h - d as f64 * d as f64 / (d + 1) as f64).abs() < 1e-9);
        // mass only on the gate
        let on_gate = ProbVector::point(d + 1, 0, Domain::Community(0));
        assert_eq!(expected_hitting_time(&v, &on_gate).unwrap(), 0.0);
    }

    #[test]
    fn nice_and_bad_gates() {
        let p = DbmParams::new(10, 2, 1.0, 0.5, 0).unwrap();
        // lambda ln n = ln 10 ~ 2.30; vertex 0: degree 2, one rewired (nice
        // when eps covers 2); vertex 1: two rewired (bad); vertex 2: none
        let g = Digraph::new(
            10,
            2,
            vec![(0, 13, true), (0, 4, false), (1, 15, true), (1, 16, true), (2, 3, false)],
        )
        .unwrap();
        let ng = nice_gates(&g, &p, 0, 0.2).unwrap();
        assert_eq!(ng.nice, vec![0]);
        assert_eq!(ng.bad, vec![1]);
        assert_eq!(ng.nice_fraction, 0.5);
        let tight = nice_gates(&g, &p, 0, 0.1).unwrap();
        assert!(tight.nice.is_empty());
        assert!(nice_gates(&g, &p, 0, 1.0).is_err());
    }
}
