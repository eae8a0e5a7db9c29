#![allow(dead_code)]

use dbm_core::Digraph;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

/// Row-stochastic kernel of the uniform walk as a dense matrix.
pub fn dense_kernel(g: &Digraph) -> DMatrix<f64> {
    let k = g.vertex_count();
    let mut p = DMatrix::zeros(k, k);
    for x in 0..k {
        let d = g.out_degree(x) as f64;
        for &y in g.out_neighbors(x) {
            p[(x, y as usize)] += 1.0 / d;
        }
    }
    p
}

pub fn row_times(mu: &[f64], p: &DMatrix<f64>) -> Vec<f64> {
    let v = DVector::from_row_slice(mu);
    (p.transpose() * v).iter().copied().collect()
}

pub fn mat_pow(p: &DMatrix<f64>, t: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(p.nrows(), p.ncols());
    for _ in 0..t {
        out = &out * p;
    }
    out
}

/// Solves `pi (P - I) = 0`, `sum pi = 1` by LU on the transposed system with
/// the last equation replaced by the normalization.
pub fn stationary_by_solve(p: &DMatrix<f64>) -> Vec<f64> {
    let k = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(k, k);
    let mut b = DVector::zeros(k);
    for j in 0..k {
        a[(k - 1, j)] = 1.0;
    }
    b[k - 1] = 1.0;
    a.lu().solve(&b).expect("singular stationary system").iter().copied().collect()
}

/// A Hamiltonian cycle through a random permutation plus each other ordered
/// pair with probability `extra`; strongly connected by construction.
pub fn random_strongly_connected<R: Rng>(k: usize, extra: f64, rng: &mut R) -> Digraph {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut adj = vec![vec![false; k]; k];
    for w in 0..k {
        adj[order[w]][order[(w + 1) % k]] = true;
    }
    for (x, row) in adj.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            if x != y && rng.random::<f64>() < extra {
                *cell = true;
            }
        }
    }
    let edges: Vec<(usize, usize)> = (0..k)
        .flat_map(|x| (0..k).filter(|&y| adj[x][y]).map(move |y| (x, y)).collect::<Vec<_>>())
        .collect();
    Digraph::simple(k, &edges).unwrap()
}

/// Two communities of width `w`. In community 0 the complete digraph has
/// vertex 0 as its only gate, with one of its out-edges rewired; community 1
/// is complete and sends one rewired edge back.
pub fn complete_pair_with_gate(w: usize) -> Digraph {
    let mut edges = Vec::new();
    for a in 0..w {
        for b in 0..w {
            if a == b {
                continue;
            }
            let rewired = a == 0 && b == 1;
            edges.push((a, if rewired { w + b } else { b }, rewired));
            let back = a == 0 && b == 1;
            edges.push((w + a, if back { b } else { w + b }, back));
        }
    }
    Digraph::new(w, 2, edges).unwrap()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
