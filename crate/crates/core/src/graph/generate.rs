use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use super::{DbmParams, DegreeTable, Digraph};
use crate::error::{Error, Result};
use crate::rng::{domain, SeedTree};

/// Samples `DBM(n, m, p, alpha)`.
///
/// Each source vertex draws its out-degree from `Binomial(n - 1, p)` and that
/// many distinct targets among the other vertices of its community; each
/// edge is then rewired with probability `alpha` to the same-label vertex of
/// a uniformly chosen other community. Vertex `v` uses its own derived
/// stream, so the result does not depend on the thread count.
pub fn generate_dbm(params: &DbmParams) -> Result<(Digraph, DegreeTable)> {
    params.validate()?;
    let (n, m) = (params.n, params.m);
    let count = params.vertex_count();
    if count > u32::MAX as usize {
        return Err(Error::InvalidParameter("m * n exceeds u32 range".into()));
    }
    let degree = Binomial::new((n - 1) as u64, params.p())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let streams = SeedTree::new(params.seed).child(domain::GENERATE);

    let rows: Vec<Vec<(u32, bool)>> = (0..count)
        .into_par_iter()
        .map(|v| {
            let mut rng = streams.stream(v as u64);
            let (c, x) = (v / n, v % n);
            let d = degree.sample(&mut rng) as usize;
            let mut row: Vec<(u32, bool)> = index::sample(&mut rng, n - 1, d)
                .into_iter()
                .map(|l| {
                    let y = if l >= x { l + 1 } else { l };
                    if rng.random::<f64>() < params.alpha {
                        let k = rng.random_range(0..m - 1);
                        let j = if k >= c { k + 1 } else { k };
                        ((j * n + y) as u32, true)
                    } else {
                        ((c * n + y) as u32, false)
                    }
                })
                .collect();
            row.sort_unstable_by_key(|e| e.0);
            row
        })
        .collect();

    let graph = Digraph::from_rows(n, m, rows);
    let table = DegreeTable::from_graph(&graph);
    Ok((graph, table))
}
