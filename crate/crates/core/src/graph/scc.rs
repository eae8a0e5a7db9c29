use super::Digraph;

const NONE: usize = usize::MAX;

/// Strongly connected components of a (possibly masked) digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component index per vertex, `usize::MAX` for masked-out vertices.
    pub label: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Components containing a cycle, i.e. with more than one vertex
    /// (self-loops do not exist).
    pub fn nontrivial(&self) -> impl Iterator<Item = usize> + '_ {
        self.sizes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 1)
            .map(|(c, _)| c)
    }
}

/// Iterative Tarjan. Components are numbered in the order they are closed,
/// which is a reverse topological order of the condensation.
pub(super) fn tarjan(graph: &Digraph, keep: Option<&[bool]>) -> Components {
    let count = graph.vertex_count();
    let kept = |v: usize| keep.is_none_or(|k| k[v]);

    let mut index = vec![NONE; count];
    let mut low = vec![0usize; count];
    let mut on_stack = vec![false; count];
    let mut stack: Vec<usize> = Vec::new();
    let mut label = vec![NONE; count];
    let mut sizes = Vec::new();
    let mut next = 0usize;
    // (vertex, position in its adjacency row)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..count {
        if !kept(root) || index[root] != NONE {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let row = graph.out_neighbors(v);
            if *pos < row.len() {
                let w = row[*pos] as usize;
                *pos += 1;
                if !kept(w) {
                    continue;
                }
                if index[w] == NONE {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let c = sizes.len();
                let mut size = 0;
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    label[w] = c;
                    size += 1;
                    if w == v {
                        break;
                    }
                }
                sizes.push(size);
            }
        }
    }
    Components { label, sizes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masked_components() {
        // 0 -> 1 -> 2 -> 0, 2 -> 3 -> 4 -> 3
        let g = Digraph::simple(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 3)]).unwrap();
        let all = g.components(None);
        assert_eq!(all.count(), 2);
        // the downstream class closes first
        assert_eq!(all.label[3], 0);
        assert_eq!(all.label[0], 1);
        let masked = g.components(Some(&[true, false, true, true, true]));
        assert_eq!(masked.label[1], NONE);
        let mut sizes = masked.sizes.clone();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2]);
        assert_eq!(masked.nontrivial().count(), 1);
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let n = 200_000;
        let mut edges: Vec<_> = (0..n - 1).map(|v| (v, v + 1)).collect();
        edges.push((n - 1, 0));
        let g = Digraph::simple(n, &edges).unwrap();
        assert!(g.strongly_connected());
    }
}
