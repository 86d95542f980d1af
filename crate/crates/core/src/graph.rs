//! Immutable DAG over dense vertices `0..n` and the structural queries the
//! learners and validators need.
//!
//! Conventions: `ancestors` / `descendants` are irreflexive
//! (`Anc(S) = ∪ Anc(v)`), the `*_closed` variants add `S` itself.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    edges: Vec<(usize, usize)>,
    parents: Vec<VertexSet>,
    children: Vec<VertexSet>,
    topo: Vec<usize>,
}

impl Dag {
    /// Builds a DAG, rejecting out-of-range endpoints, self-loops, duplicate
    /// edges and cycles.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut parents = vec![VertexSet::new(); n];
        let mut children = vec![VertexSet::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            parents[v].insert(u);
            children[u].insert(v);
        }
        let topo = kahn_order(n, &parents, &children)?;
        Ok(Self {
            n,
            edges: seen.into_iter().collect(),
            parents,
            children,
            topo,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, []).expect("edgeless graph is acyclic")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// Edges in ascending `(u, v)` order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        v < self.n && self.parents[v].contains(u)
    }

    /// One topological order; ties broken by smallest index.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub fn check_set(&self, set: &VertexSet) -> Result<()> {
        match set.bound() {
            b if b <= self.n => Ok(()),
            b => Err(Error::VertexOutOfRange { vertex: b - 1, n: self.n }),
        }
    }

    pub fn parents(&self, v: usize) -> Result<&VertexSet> {
        self.check_vertex(v)?;
        Ok(&self.parents[v])
    }

    pub fn children(&self, v: usize) -> Result<&VertexSet> {
        self.check_vertex(v)?;
        Ok(&self.children[v])
    }

    /// `Anc(S)`: vertices with a directed path of length ≥ 1 into `S`.
    pub fn ancestors(&self, set: &VertexSet) -> Result<VertexSet> {
        self.check_set(set)?;
        Ok(self.reach(set, &self.parents))
    }

    /// `Des(S)`: vertices reachable from `S` by a directed path of length ≥ 1.
    pub fn descendants(&self, set: &VertexSet) -> Result<VertexSet> {
        self.check_set(set)?;
        Ok(self.reach(set, &self.children))
    }

    /// `Anc[S] = Anc(S) ∪ S`.
    pub fn anc_closed(&self, set: &VertexSet) -> Result<VertexSet> {
        Ok(self.ancestors(set)?.union(set))
    }

    /// `Des[S] = Des(S) ∪ S`.
    pub fn des_closed(&self, set: &VertexSet) -> Result<VertexSet> {
        Ok(self.descendants(set)?.union(set))
    }

    fn reach(&self, seeds: &VertexSet, step: &[VertexSet]) -> VertexSet {
        let mut out = VertexSet::new();
        let mut stack: Vec<usize> = seeds.iter().collect();
        while let Some(x) = stack.pop() {
            for y in &step[x] {
                if out.insert(y) {
                    stack.push(y);
                }
            }
        }
        out
    }

    /// `src(S) = {v ∈ S : Anc(v) ∩ S = ∅}`.
    pub fn src_of(&self, set: &VertexSet) -> Result<VertexSet> {
        self.check_set(set)?;
        Ok(set
            .iter()
            .filter(|&v| {
                self.reach(&VertexSet::singleton(v), &self.parents)
                    .is_disjoint(set)
            })
            .collect())
    }

    /// True iff no vertex of `S` has an ancestor outside `S`.
    pub fn is_prefix_set(&self, set: &VertexSet) -> Result<bool> {
        self.check_set(set)?;
        Ok(self.reach(set, &self.parents).is_subset(set))
    }

    /// `u → v` is covered iff `Pa(u) ∪ {u} = Pa(v)`.
    pub fn is_covered(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) && self.parents[u].with(u) == self.parents[v]
    }

    /// All covered edges in ascending order.
    pub fn covered_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .copied()
            .filter(|&(u, v)| self.is_covered(u, v))
            .collect()
    }

    /// Whether every path between `A` and `B` is blocked by `C \ (A ∪ B)`.
    ///
    /// Reachability over (vertex, direction) states: a ball arriving from a
    /// child may continue anywhere unless the vertex is observed; a ball
    /// arriving from a parent passes on to children when unobserved and
    /// bounces back to parents when the vertex is in `Anc[C]`.
    pub fn d_separated(&self, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Argument("d-separation needs nonempty A and B".into()));
        }
        if !a.is_disjoint(b) {
            return Err(Error::Argument("d-separation needs disjoint A and B".into()));
        }
        for s in [a, b, c] {
            self.check_set(s)?;
        }
        let cond = c.difference(&a.union(b));
        let observed_anc = self.reach(&cond, &self.parents).union(&cond);

        // visited[v][0]: arrived from a child (moving up), [1]: from a parent.
        let mut visited = vec![[false; 2]; self.n];
        let mut queue: VecDeque<(usize, usize)> = a.iter().map(|v| (v, 0)).collect();
        while let Some((v, dir)) = queue.pop_front() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            let observed = cond.contains(v);
            if !observed && b.contains(v) {
                return Ok(false);
            }
            if dir == 0 {
                if !observed {
                    queue.extend(self.parents[v].iter().map(|p| (p, 0)));
                    queue.extend(self.children[v].iter().map(|ch| (ch, 1)));
                }
            } else {
                if !observed {
                    queue.extend(self.children[v].iter().map(|ch| (ch, 1)));
                }
                if observed_anc.contains(v) {
                    queue.extend(self.parents[v].iter().map(|p| (p, 0)));
                }
            }
        }
        Ok(true)
    }

    /// The mutilated graph with every edge into a target removed.
    pub fn mutilate(&self, intervention: &Intervention) -> Result<Dag> {
        self.check_set(&intervention.targets)?;
        Dag::new(
            self.n,
            self.edges
                .iter()
                .copied()
                .filter(|&(_, v)| !intervention.targets.contains(v)),
        )
    }

    pub fn to_json(&self, labels: Option<&[String]>) -> DagJson {
        DagJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            labels: labels.map(<[String]>::to_vec),
        }
    }
}

fn kahn_order(n: usize, parents: &[VertexSet], children: &[VertexSet]) -> Result<Vec<usize>> {
    let mut indegree: Vec<usize> = parents.iter().map(VertexSet::len).collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| indegree[v] > 0).unwrap_or(0);
        return Err(Error::Cycle(stuck));
    }
    Ok(order)
}

/// A hard intervention on `targets`, identified by `id` (its regime index).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intervention {
    pub id: usize,
    pub targets: VertexSet,
}

impl Intervention {
    pub fn new(id: usize, targets: impl Into<VertexSet>) -> Self {
        Self { id, targets: targets.into() }
    }
}

/// Assigns ids `0..k` in order.
pub fn interventions_from_targets(targets: impl IntoIterator<Item = VertexSet>) -> Vec<Intervention> {
    targets
        .into_iter()
        .enumerate()
        .map(|(id, targets)| Intervention { id, targets })
        .collect()
}

/// On-disk DAG: `{"n": .., "edges": [[u, v], ..], "labels": [..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DagJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl DagJson {
    pub fn into_dag(self) -> Result<(Dag, Option<Vec<String>>)> {
        if let Some(labels) = &self.labels {
            if labels.len() != self.n {
                return Err(Error::Input(format!(
                    "{} labels for {} vertices",
                    labels.len(),
                    self.n
                )));
            }
        }
        let dag = Dag::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))?;
        Ok((dag, self.labels))
    }
}

pub fn read_dag_json(path: &Path) -> Result<(Dag, Option<Vec<String>>)> {
    let text = std::fs::read_to_string(path)?;
    let parsed: DagJson = serde_json::from_str(&text)?;
    parsed.into_dag()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Dag {
        Dag::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn star4() -> Dag {
        Dag::new(4, [(0, 3), (1, 3), (2, 3)]).unwrap()
    }

    fn set<const N: usize>(items: [usize; N]) -> VertexSet {
        VertexSet::from(items)
    }

    #[test]
    fn closures_on_chain() {
        let g = chain3();
        assert_eq!(g.ancestors(&set([2])).unwrap(), set([0, 1]));
        assert_eq!(g.des_closed(&set([1])).unwrap(), set([1, 2]));
        assert_eq!(g.anc_closed(&set([1])).unwrap(), set([0, 1]));
        assert_eq!(g.descendants(&set([2])).unwrap(), VertexSet::new());
        assert_eq!(star4().parents(3).unwrap(), &set([0, 1, 2]));
    }

    #[test]
    fn out_of_range_vertex_is_rejected() {
        let g = chain3();
        assert!(matches!(g.parents(3), Err(Error::VertexOutOfRange { vertex: 3, n: 3 })));
        assert!(g.ancestors(&set([7])).is_err());
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(Dag::new(2, [(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(Dag::new(2, [(0, 1), (0, 1)]), Err(Error::DuplicateEdge(0, 1))));
        assert!(matches!(Dag::new(3, [(0, 1), (1, 2), (2, 0)]), Err(Error::Cycle(_))));
        assert!(matches!(Dag::new(2, [(0, 2)]), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn degenerate_sizes_are_legal() {
        let g0 = Dag::empty(0);
        assert_eq!(g0.src_of(&VertexSet::new()).unwrap(), VertexSet::new());
        assert!(g0.is_prefix_set(&VertexSet::new()).unwrap());
        assert!(g0.covered_edges().is_empty());
        let g1 = Dag::empty(1);
        assert_eq!(g1.src_of(&set([0])).unwrap(), set([0]));
        assert_eq!(g1.descendants(&set([0])).unwrap(), VertexSet::new());
    }

    #[test]
    fn sources() {
        assert_eq!(chain3().src_of(&set([1, 2])).unwrap(), set([1]));
        let g = star4();
        assert_eq!(g.src_of(&g.vertices()).unwrap(), set([0, 1, 2]));
        assert_eq!(g.src_of(&VertexSet::new()).unwrap(), VertexSet::new());
    }

    #[test]
    fn prefix_sets() {
        let g = chain3();
        assert!(g.is_prefix_set(&set([0, 1])).unwrap());
        assert!(!g.is_prefix_set(&set([1])).unwrap());
        assert!(g.is_prefix_set(&VertexSet::new()).unwrap());
        assert!(g.is_prefix_set(&g.vertices()).unwrap());
    }

    #[test]
    fn covered() {
        assert_eq!(Dag::new(2, [(0, 1)]).unwrap().covered_edges(), vec![(0, 1)]);
        assert_eq!(chain3().covered_edges(), vec![(0, 1)]);
        assert!(star4().covered_edges().is_empty());
    }

    #[test]
    fn d_separation_examples() {
        let g = Dag::new(4, [(0, 1), (1, 3), (0, 2), (3, 2)]).unwrap();
        assert!(g.d_separated(&set([0]), &set([3]), &set([1])).unwrap());
        assert!(!g.d_separated(&set([0]), &set([3]), &set([1, 2])).unwrap());
        let iso = Dag::empty(2);
        assert!(iso.d_separated(&set([0]), &set([1]), &VertexSet::new()).unwrap());
        assert!(iso.d_separated(&VertexSet::new(), &set([1]), &VertexSet::new()).is_err());
    }

    #[test]
    fn d_separation_drops_overlap_from_conditioning_set() {
        let g = chain3();
        assert_eq!(
            g.d_separated(&set([0]), &set([2]), &set([0, 2])).unwrap(),
            g.d_separated(&set([0]), &set([2]), &VertexSet::new()).unwrap()
        );
    }

    #[test]
    fn collider_opened_by_descendant() {
        // 0 -> 2 <- 1, 2 -> 3: conditioning on 3 opens the collider.
        let g = Dag::new(4, [(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(g.d_separated(&set([0]), &set([1]), &VertexSet::new()).unwrap());
        assert!(!g.d_separated(&set([0]), &set([1]), &set([3])).unwrap());
    }

    #[test]
    fn mutilation() {
        let g = chain3();
        assert_eq!(g.mutilate(&Intervention::new(0, [1])).unwrap().edges(), &[(1, 2)]);
        assert_eq!(g.mutilate(&Intervention::new(0, VertexSet::new())).unwrap(), g);
        assert!(star4().mutilate(&Intervention::new(0, [3])).unwrap().edges().is_empty());
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let g = star4();
        let labels = vec!["a".to_string(), "b".into(), "c".into(), "d".into()];
        let text = serde_json::to_string(&g.to_json(Some(&labels))).unwrap();
        let (back, back_labels) = serde_json::from_str::<DagJson>(&text).unwrap().into_dag().unwrap();
        assert_eq!(back, g);
        assert_eq!(back_labels.unwrap(), labels);

        let cyclic: DagJson = serde_json::from_str(r#"{"n":2,"edges":[[0,1],[1,0]]}"#).unwrap();
        assert!(matches!(cyclic.into_dag(), Err(Error::Cycle(_))));
        let dup: DagJson = serde_json::from_str(r#"{"n":2,"edges":[[0,1],[0,1]]}"#).unwrap();
        assert!(dup.into_dag().is_err());
    }
}
