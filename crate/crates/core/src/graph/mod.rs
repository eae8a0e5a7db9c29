//! Directed block model graphs.
//!
//! Vertices are numbered `community * n + label`, so the community of a vertex
//! is `v / n` and its label `v % n`. Out-adjacency is stored in compressed
//! rows sorted by target, with a per-edge flag marking rewired edges.

mod generate;
mod io;
mod scc;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::generate_dbm;
pub use io::{load_graph, save_graph, GraphFormat};
pub use scc::Components;

/// Parameters of `DBM(n, m, p, alpha)` with `p = lambda * ln(n) / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbmParams {
    /// Vertices per community.
    pub n: usize,
    /// Number of communities.
    pub m: usize,
    pub lambda: f64,
    /// Rewiring probability.
    pub alpha: f64,
    pub seed: u64,
}

impl DbmParams {
    pub fn new(n: usize, m: usize, lambda: f64, alpha: f64, seed: u64) -> Result<Self> {
        let params = Self {
            n,
            m,
            lambda,
            alpha,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("n = {} < 2", self.n)));
        }
        if self.m < 2 {
            return Err(Error::InvalidParameter(format!("m = {} < 2", self.m)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} must be positive",
                self.lambda
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} outside [0, 1]",
                self.alpha
            )));
        }
        let p = self.p();
        if p > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "p = lambda ln(n) / n = {p} exceeds 1"
            )));
        }
        Ok(())
    }

    /// Intra-community edge probability.
    pub fn p(&self) -> f64 {
        self.lambda * (self.n as f64).ln() / self.n as f64
    }

    /// `lambda * ln(n)`, the first-order mean out-degree.
    pub fn degree_scale(&self) -> f64 {
        self.lambda * (self.n as f64).ln()
    }

    pub fn vertex_count(&self) -> usize {
        self.n * self.m
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }
}

/// Immutable sparse digraph over `m` communities of `n` vertices.
///
/// A plain digraph (no community structure) is represented with a single
/// community spanning every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    width: usize,
    communities: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    rewired: Vec<bool>,
}

impl Digraph {
    /// Builds a graph from `(source, target, rewired)` triples, checking every
    /// structural invariant: ids in range, no self-loops, no duplicate pairs,
    /// rewired edges crossing communities and plain edges staying inside.
    pub fn new(width: usize, communities: usize, edges: Vec<(usize, usize, bool)>) -> Result<Self> {
        if width == 0 || communities == 0 {
            return Err(Error::MalformedGraph("empty vertex set".into()));
        }
        let count = width
            .checked_mul(communities)
            .filter(|&c| c <= u32::MAX as usize)
            .ok_or_else(|| Error::MalformedGraph("vertex count overflows u32".into()))?;
        let mut offsets = vec![0usize; count + 1];
        for &(s, t, r) in &edges {
            for v in [s, t] {
                if v >= count {
                    return Err(Error::VertexOutOfRange { vertex: v, count });
                }
            }
            if s == t {
                return Err(Error::MalformedGraph(format!("self-loop at {s}")));
            }
            let crosses = s / width != t / width;
            if r && !crosses {
                return Err(Error::MalformedGraph(format!(
                    "rewired edge ({s}, {t}) stays inside its community"
                )));
            }
            if !r && crosses {
                return Err(Error::MalformedGraph(format!(
                    "edge ({s}, {t}) crosses communities without a rewired flag"
                )));
            }
            offsets[s + 1] += 1;
        }
        for v in 0..count {
            offsets[v + 1] += offsets[v];
        }
        let mut cursor = offsets.clone();
        let mut slots = vec![(0u32, false); edges.len()];
        for (s, t, r) in edges {
            slots[cursor[s]] = (t as u32, r);
            cursor[s] += 1;
        }
        for v in 0..count {
            let row = &mut slots[offsets[v]..offsets[v + 1]];
            row.sort_unstable_by_key(|e| e.0);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::MalformedGraph(format!(
                    "duplicate edge ({v}, {})",
                    w[0].0
                )));
            }
        }
        let (targets, rewired) = slots.into_iter().unzip();
        Ok(Self {
            width,
            communities,
            offsets,
            targets,
            rewired,
        })
    }

    /// A plain digraph on `vertex_count` vertices (one community, no rewiring).
    pub fn simple(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(
            vertex_count,
            1,
            edges.iter().map(|&(s, t)| (s, t, false)).collect(),
        )
    }

    /// Assembles rows that are already sorted and valid.
    pub(crate) fn from_rows(width: usize, communities: usize, rows: Vec<Vec<(u32, bool)>>) -> Self {
        debug_assert_eq!(rows.len(), width * communities);
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let total = rows.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        let mut rewired = Vec::with_capacity(total);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (t, r) in row {
                targets.push(t);
                rewired.push(r);
            }
            offsets.push(targets.len());
        }
        Self {
            width,
            communities,
            offsets,
            targets,
            rewired,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Community width `n`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn community_count(&self) -> usize {
        self.communities
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn out_flags(&self, v: usize) -> &[bool] {
        &self.rewired[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.out_neighbors(v)
            .iter()
            .zip(self.out_flags(v))
            .map(|(&t, &r)| (t as usize, r))
    }

    /// All edges as `(source, target, rewired)`, in source-then-target order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| self.out_edges(v).map(move |(t, r)| (v, t, r)))
    }

    pub fn rewired_edge_count(&self) -> usize {
        self.rewired.iter().filter(|&&r| r).count()
    }

    /// Unchecked community lookup.
    #[inline]
    pub fn community(&self, v: usize) -> usize {
        v / self.width
    }

    pub fn community_of(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.community(v))
    }

    #[inline]
    pub fn label(&self, v: usize) -> usize {
        v % self.width
    }

    pub fn community_range(&self, i: usize) -> Range<usize> {
        i * self.width..(i + 1) * self.width
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            })
        }
    }

    pub fn check_community(&self, i: usize) -> Result<()> {
        if i < self.communities {
            Ok(())
        } else {
            Err(Error::CommunityOutOfRange {
                index: i,
                count: self.communities,
            })
        }
    }

    /// Gates of community `i`: its vertices with at least one rewired out-edge.
    pub fn gates(&self, i: usize) -> Result<Vec<usize>> {
        self.check_community(i)?;
        Ok(self
            .community_range(i)
            .filter(|&v| self.out_flags(v).iter().any(|&r| r))
            .collect())
    }

    /// The community graph `G_i` before rewiring, on local labels `0..n`.
    ///
    /// Each rewired edge `(x, y)` is mapped back to `(x, label(y))`.
    pub fn pre_rewiring_subgraph(&self, i: usize) -> Result<Digraph> {
        self.check_community(i)?;
        let rows = self
            .community_range(i)
            .map(|v| {
                let mut row: Vec<(u32, bool)> = self
                    .out_neighbors(v)
                    .iter()
                    .map(|&t| (self.label(t as usize) as u32, false))
                    .collect();
                row.sort_unstable_by_key(|e| e.0);
                row
            })
            .collect();
        Ok(Digraph::from_rows(self.width, 1, rows))
    }

    /// Strongly connected components (Tarjan), restricted to vertices with
    /// `keep[v]` when a mask is given.
    pub fn components(&self, keep: Option<&[bool]>) -> Components {
        scc::tarjan(self, keep)
    }

    pub fn strongly_connected(&self) -> bool {
        self.components(None).count() == 1
    }
}

/// Per-vertex degree sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeTable {
    /// `D+`
    pub out_total: Vec<u32>,
    /// `I+`: out-edges untouched by rewiring.
    pub out_intra: Vec<u32>,
    /// `O+`: rewired out-edges.
    pub out_rewired: Vec<u32>,
    /// `D-` in the final graph.
    pub in_total: Vec<u32>,
    /// In-degree in the community graph before rewiring.
    pub in_intra_pre: Vec<u32>,
}

impl DegreeTable {
    pub fn from_graph(graph: &Digraph) -> Self {
        let count = graph.vertex_count();
        let mut table = Self {
            out_total: vec![0; count],
            out_intra: vec![0; count],
            out_rewired: vec![0; count],
            in_total: vec![0; count],
            in_intra_pre: vec![0; count],
        };
        for (s, t, r) in graph.edges() {
            table.out_total[s] += 1;
            if r {
                table.out_rewired[s] += 1;
            } else {
                table.out_intra[s] += 1;
            }
            table.in_total[t] += 1;
            let pre = graph.community(s) * graph.width() + graph.label(t);
            table.in_intra_pre[pre] += 1;
        }
        table
    }

    pub fn len(&self) -> usize {
        self.out_total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out_total.is_empty()
    }
}

/// Extremes of `D+`, `D-` and pre-rewiring `D-` over all vertices, and their
/// ratios to a degree scale (normally `lambda * ln n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeExtremes {
    pub min: u32,
    pub max: u32,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub fn degree_extremes(table: &DegreeTable, scale: f64) -> DegreeExtremes {
    let all = table
        .out_total
        .iter()
        .chain(&table.in_total)
        .chain(&table.in_intra_pre)
        .copied();
    let (min, max) = all.fold((u32::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let min = if table.is_empty() { 0 } else { min };
    DegreeExtremes {
        min,
        max,
        min_ratio: min as f64 / scale,
        max_ratio: max as f64 / scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Digraph::simple(n, &edges).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(DbmParams::new(1, 2, 1.0, 0.1, 0).is_err());
        assert!(DbmParams::new(10, 1, 1.0, 0.1, 0).is_err());
        assert!(DbmParams::new(10, 2, 0.0, 0.1, 0).is_err());
        assert!(DbmParams::new(10, 2, 1.0, 1.5, 0).is_err());
        // p = 10 ln 10 / 10 > 1
        assert!(DbmParams::new(10, 2, 10.0, 0.1, 0).is_err());
        let p = DbmParams::new(2000, 2, 2.0, 0.01, 0).unwrap();
        assert!((p.p() - 2.0 * 2000f64.ln() / 2000.0).abs() < 1e-15);
    }

    #[test]
    fn community_lookup() {
        let g = Digraph::new(5, 3, vec![]).unwrap();
        assert_eq!(g.community_of(0).unwrap(), 0);
        assert_eq!(g.community_of(5).unwrap(), 1);
        assert_eq!(g.community_of(14).unwrap(), 2);
        assert!(matches!(
            g.community_of(15),
            Err(Error::VertexOutOfRange { vertex: 15, .. })
        ));
    }

    #[test]
    fn rejects_structural_violations() {
        assert!(Digraph::simple(3, &[(0, 0)]).is_err());
        assert!(Digraph::simple(3, &[(0, 1), (0, 1)]).is_err());
        assert!(Digraph::simple(3, &[(0, 3)]).is_err());
        // rewired flag must match community crossing
        assert!(Digraph::new(2, 2, vec![(0, 1, true)]).is_err());
        assert!(Digraph::new(2, 2, vec![(0, 3, false)]).is_err());
        assert!(Digraph::new(2, 2, vec![(0, 3, true)]).is_ok());
    }

    #[test]
    fn rows_are_sorted() {
        let g = Digraph::simple(4, &[(0, 3), (0, 1), (0, 2)]).unwrap();
        assert_eq!(g.out_neighbors(0), &[1, 2, 3]);
    }

    #[test]
    fn strong_connectivity() {
        assert!(cycle(7).strongly_connected());
        let two = Digraph::simple(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!two.strongly_connected());
        assert_eq!(two.components(None).count(), 2);
    }

    #[test]
    fn degree_extremes_regular_and_empty() {
        let g = cycle(5);
        let ext = degree_extremes(&DegreeTable::from_graph(&g), 1.0);
        assert_eq!((ext.min, ext.max), (1, 1));
        let empty = Digraph::simple(4, &[]).unwrap();
        let ext = degree_extremes(&DegreeTable::from_graph(&empty), 1.0);
        assert_eq!((ext.min, ext.max), (0, 0));
    }

    #[test]
    fn pre_rewiring_maps_back_by_label() {
        // community width 3; vertex 0 -> 1 plain, 0 -> 5 (label 2 in community 1) rewired
        let g = Digraph::new(3, 2, vec![(0, 1, false), (0, 5, true), (4, 3, false)]).unwrap();
        let g0 = g.pre_rewiring_subgraph(0).unwrap();
        assert_eq!(g0.out_neighbors(0), &[1, 2]);
        let g1 = g.pre_rewiring_subgraph(1).unwrap();
        assert_eq!(g1.out_neighbors(1), &[0]);
        let t = DegreeTable::from_graph(&g);
        assert_eq!(t.in_intra_pre[2], 1);
        assert_eq!(t.in_total[5], 1);
        assert_eq!(g.gates(0).unwrap(), vec![0]);
        assert!(g.gates(1).unwrap().is_empty());
    }
}
