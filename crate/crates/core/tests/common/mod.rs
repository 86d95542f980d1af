//! Brute-force reference implementations used by the integration and
//! acceptance tests. Everything here works from a plain edge list and a
//! transitive-closure matrix.

#![allow(dead_code)]

use ccpg::{CcpgOutput, Intervention, VertexSet};
use proptest::prelude::*;

pub struct Brute {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    /// `reach[u][v]`: a directed path of length at least one from `u` to `v`.
    pub reach: Vec<Vec<bool>>,
    pub adj: Vec<Vec<bool>>,
}

impl Brute {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            adj[u][v] = true;
        }
        let mut reach = adj.clone();
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        Brute { n, edges: edges.to_vec(), reach, adj }
    }

    pub fn parents(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.adj[u][v]).collect()
    }

    pub fn is_ancestor(&self, a: usize, v: usize) -> bool {
        a == v || self.reach[a][v]
    }

    pub fn is_prefix(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| (0..self.n).all(|a| !self.reach[a][v] || set.contains(a)))
    }

    pub fn is_des_closed(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| (0..self.n).all(|d| !self.reach[v][d] || set.contains(d)))
    }

    pub fn src(&self, set: &VertexSet) -> VertexSet {
        set.iter().filter(|&v| set.iter().all(|a| !self.reach[a][v])).collect()
    }

    pub fn is_covered(&self, u: usize, v: usize) -> bool {
        if !self.adj[u][v] {
            return false;
        }
        let mut pu = self.parents(u);
        pu.push(u);
        pu.sort_unstable();
        pu == self.parents(v)
    }

    fn active_interior(&self, a: usize, b: usize, c: usize, z: &VertexSet) -> bool {
        let collider = self.adj[a][b] && self.adj[c][b];
        if collider {
            z.iter().any(|w| self.is_ancestor(b, w))
        } else {
            !z.contains(b)
        }
    }

    /// Enumerates every simple skeleton path from `x` to `y` and reports
    /// whether all of them are blocked by `z`.
    pub fn dsep(&self, x: usize, y: usize, z: &VertexSet) -> bool {
        let mut on_path = vec![false; self.n];
        let mut path = vec![x];
        on_path[x] = true;
        !self.search(y, z, &mut path, &mut on_path)
    }

    fn search(&self, y: usize, z: &VertexSet, path: &mut Vec<usize>, on_path: &mut [bool]) -> bool {
        let last = *path.last().unwrap();
        for next in 0..self.n {
            if on_path[next] || !(self.adj[last][next] || self.adj[next][last]) {
                continue;
            }
            if path.len() >= 2 {
                let prev = path[path.len() - 2];
                if !self.active_interior(prev, last, next, z) {
                    continue;
                }
            }
            if next == y {
                return true;
            }
            path.push(next);
            on_path[next] = true;
            let found = self.search(y, z, path, on_path);
            path.pop();
            on_path[next] = false;
            if found {
                return true;
            }
        }
        false
    }

    /// Independent check of the (I-)CCPG definition. Returns the names of
    /// the failed conditions.
    pub fn ccpg_failures(&self, out: &CcpgOutput, ints: &[Intervention]) -> Vec<&'static str> {
        let mut fails = Vec::new();
        let mut owner = vec![usize::MAX; self.n];
        let mut partition_ok = true;
        for (i, c) in out.components.iter().enumerate() {
            for v in c {
                if v >= self.n || owner[v] != usize::MAX {
                    partition_ok = false;
                } else {
                    owner[v] = i;
                }
            }
        }
        if !partition_ok || owner.contains(&usize::MAX) {
            return vec!["partition"];
        }
        if out.components.iter().any(|c| self.src(c).len() != 1) {
            fails.push("single_source");
        }
        let cut = |u: usize, v: usize| ints.iter().any(|i| i.targets.contains(u) != i.targets.contains(v));
        let multi_ok = out.components.iter().filter(|c| c.len() > 1).all(|c| {
            self.edges
                .iter()
                .any(|&(u, v)| c.contains(u) && c.contains(v) && self.is_covered(u, v) && !cut(u, v))
        });
        if !multi_ok {
            fails.push("covered_edge");
        }
        if self
            .edges
            .iter()
            .any(|&(u, v)| owner[u] != owner[v] && !out.edges.contains(&(owner[u], owner[v])))
        {
            fails.push("absent_edges");
        }
        let into_src = out.edges.iter().all(|&(i, j)| {
            let src = self.src(&out.components[j]);
            src.iter().any(|s| out.components[i].iter().any(|p| self.adj[p][s]))
        });
        if !into_src {
            fails.push("edge_into_source");
        }
        if out.edges.iter().any(|&(i, j)| i >= j) {
            fails.push("topological");
        }
        let mut cum = VertexSet::new();
        let mut chain_ok = out.layers.windows(2).all(|w| w[0] <= w[1]);
        let layers = out.layers.iter().max().map_or(0, |l| l + 1);
        for t in 0..layers {
            for (c, &l) in out.components.iter().zip(&out.layers) {
                if l == t {
                    cum.union_with(c);
                }
            }
            chain_ok &= self.is_prefix(&cum);
        }
        if !chain_ok {
            fails.push("prefix_chain");
        }
        fails
    }

    /// Singleton components whose edges reproduce the graph exactly.
    pub fn equals(&self, out: &CcpgOutput) -> bool {
        if out.components.len() != self.n || out.components.iter().any(|c| c.len() != 1) {
            return false;
        }
        let vertex: Vec<usize> = out.components.iter().map(|c| c.iter().next().unwrap()).collect();
        let mut got: Vec<(usize, usize)> = out.edges.iter().map(|&(i, j)| (vertex[i], vertex[j])).collect();
        let mut want = self.edges.clone();
        got.sort_unstable();
        want.sort_unstable();
        got == want
    }
}

/// All subsets of `items` as vertex sets.
pub fn subsets(items: &[usize]) -> impl Iterator<Item = VertexSet> + '_ {
    (0u64..1 << items.len()).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// A random DAG on up to `max_n` vertices with shuffled labels, so vertex
/// order does not coincide with a topological order.
pub fn arb_dag(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(prop::bool::weighted(0.4), pairs),
        )
            .prop_map(move |(perm, bits)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[k] {
                            edges.push((perm[i], perm[j]));
                        }
                        k += 1;
                    }
                }
                (n, edges)
            })
    })
}
