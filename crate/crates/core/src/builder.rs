//! End-to-end CCPG learning: prefix chain, layer splitting, component DAG.

use serde::{Deserialize, Serialize};

use crate::ci::{CiCounter, CiOracle, CiTest, Regime};
use crate::error::{Error, Result};
use crate::graph::{Dag, Intervention};
use crate::prefix::{learn_prefix_int, PrefixStepTrace};
use crate::vertex_set::VertexSet;

/// Ordered partition `V_1..V_k` with a DAG over component indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcpgOutput {
    pub components: Vec<VertexSet>,
    /// `(i, j)` pairs with `i < j`, ascending.
    pub edges: Vec<(usize, usize)>,
    /// Layer index of each component.
    pub layers: Vec<usize>,
    pub ci_total: u64,
    pub ci_unique: u64,
    /// Counter deltas for the prefix, split and component-DAG phases.
    #[serde(skip)]
    pub phases: PhaseCounters,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseCounters {
    pub prefix: CiCounter,
    pub split: CiCounter,
    pub edges: CiCounter,
}

impl CcpgOutput {
    pub fn n(&self) -> usize {
        self.components.iter().map(VertexSet::len).sum()
    }

    pub fn num_layers(&self) -> usize {
        self.layers.iter().max().map_or(0, |l| l + 1)
    }

    /// Union of all components in layers `0..=t`.
    pub fn cumulative_layer(&self, t: usize) -> VertexSet {
        let mut out = VertexSet::new();
        for (c, &l) in self.components.iter().zip(&self.layers) {
            if l <= t {
                out.union_with(c);
            }
        }
        out
    }

    /// Component index of each vertex; fails if the components do not
    /// partition `0..n`.
    pub fn component_of(&self, n: usize) -> Result<Vec<usize>> {
        let mut owner = vec![usize::MAX; n];
        for (i, c) in self.components.iter().enumerate() {
            for v in c {
                if v >= n {
                    return Err(Error::Argument(format!("component {i} holds vertex {v} outside 0..{n}")));
                }
                if owner[v] != usize::MAX {
                    return Err(Error::Argument(format!("vertex {v} is in components {} and {i}", owner[v])));
                }
                owner[v] = i;
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Argument(format!("vertex {v} is in no component")));
        }
        Ok(owner)
    }

    /// True iff every component is a singleton and the component DAG maps
    /// onto exactly the edges of `g`.
    pub fn equals_dag(&self, g: &Dag) -> bool {
        if self.components.len() != g.n() || self.components.iter().any(|c| c.len() != 1) {
            return false;
        }
        let vertex: Vec<usize> = self.components.iter().map(|c| c.first().unwrap_or(0)).collect();
        let mut mapped: Vec<(usize, usize)> =
            self.edges.iter().map(|&(i, j)| (vertex[i], vertex[j])).collect();
        mapped.sort_unstable();
        mapped == g.edges()
    }

    pub fn to_json(&self) -> CcpgJson {
        CcpgJson {
            components: self.components.iter().map(VertexSet::to_vec).collect(),
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
            layers: self.layers.clone(),
            ci_total: self.ci_total,
            ci_unique: self.ci_unique,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("plain data serializes")
    }
}

/// `{"components": [[..]], "edges": [[i, j]], "layers": [..], "ci_total": N, "ci_unique": M}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcpgJson {
    pub components: Vec<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
    pub layers: Vec<usize>,
    pub ci_total: u64,
    pub ci_unique: u64,
}

impl From<CcpgJson> for CcpgOutput {
    fn from(j: CcpgJson) -> Self {
        Self {
            components: j.components.into_iter().map(|c| c.into_iter().collect()).collect(),
            edges: j.edges.into_iter().map(|[i, k]| (i, k)).collect(),
            layers: j.layers,
            ci_total: j.ci_total,
            ci_unique: j.ci_unique,
            phases: PhaseCounters::default(),
        }
    }
}

/// Layers `S_1, S_2, ...` (successive differences of the prefix chain) and
/// the trace of every step.
pub struct PrefixChain {
    pub layers: Vec<VertexSet>,
    pub steps: Vec<PrefixStepTrace>,
}

pub fn prefix_chain<T: CiTest>(
    oracle: &mut CiOracle<T>,
    interventions: Option<&[Intervention]>,
) -> Result<PrefixChain> {
    let n = oracle.n();
    let interventions = interventions.unwrap_or(&[]);
    let mut s = VertexSet::new();
    let mut chain = PrefixChain { layers: Vec::new(), steps: Vec::new() };
    while s.len() < n {
        let step = learn_prefix_int(oracle, &s, interventions)?;
        chain.layers.push(step.output_prefix.difference(&s));
        s = step.output_prefix.clone();
        chain.steps.push(step);
    }
    Ok(chain)
}

/// Connected components of `{v - w : v ⊥̸ w | before}` on `layer`, ordered by
/// minimum vertex.
pub fn split_layer<T: CiTest>(
    oracle: &mut CiOracle<T>,
    layer: &VertexSet,
    before: &VertexSet,
) -> Result<Vec<VertexSet>> {
    let verts = layer.to_vec();
    let mut root: Vec<usize> = (0..verts.len()).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            if oracle.dep(verts[i], verts[j], before)? {
                let (a, b) = (find(&mut root, i), find(&mut root, j));
                root[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<VertexSet> = Vec::new();
    let mut group_of_root = vec![usize::MAX; verts.len()];
    for i in 0..verts.len() {
        let r = find(&mut root, i);
        if group_of_root[r] == usize::MAX {
            group_of_root[r] = groups.len();
            groups.push(VertexSet::new());
        }
        groups[group_of_root[r]].insert(verts[i]);
    }
    Ok(groups)
}

/// Edge `i → j` for `i < j` iff `V_i ⊥̸ V_j | V_1 ∪ … ∪ V_{j-1}`.
pub fn component_dag<T: CiTest>(
    oracle: &mut CiOracle<T>,
    components: &[VertexSet],
) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    let mut before = VertexSet::new();
    for j in 0..components.len() {
        for i in 0..j {
            if oracle.dependent(&components[i], &components[j], &before, Regime::Observational)? {
                edges.push((i, j));
            }
        }
        before.union_with(&components[j]);
    }
    edges.sort_unstable();
    Ok(edges)
}

/// A learned CCPG plus the per-step prefix traces.
pub struct BuildResult {
    pub output: CcpgOutput,
    pub steps: Vec<PrefixStepTrace>,
}

pub fn build<T: CiTest>(oracle: &mut CiOracle<T>) -> Result<CcpgOutput> {
    Ok(build_traced(oracle, &[])?.output)
}

pub fn build_int<T: CiTest>(
    oracle: &mut CiOracle<T>,
    interventions: &[Intervention],
) -> Result<CcpgOutput> {
    Ok(build_traced(oracle, interventions)?.output)
}

pub fn build_traced<T: CiTest>(
    oracle: &mut CiOracle<T>,
    interventions: &[Intervention],
) -> Result<BuildResult> {
    if oracle.n() == 0 {
        return Err(Error::Argument("cannot learn a graph on zero vertices".into()));
    }
    let start = oracle.counter();
    let chain = prefix_chain(oracle, Some(interventions))?;
    let after_prefix = oracle.counter();

    let mut components = Vec::new();
    let mut layer_of = Vec::new();
    let mut before = VertexSet::new();
    for (t, layer) in chain.layers.iter().enumerate() {
        for part in split_layer(oracle, layer, &before)? {
            components.push(part);
            layer_of.push(t);
        }
        before.union_with(layer);
    }
    let after_split = oracle.counter();

    let edges = component_dag(oracle, &components)?;
    let end = oracle.counter();
    let total = end.since(&start);
    Ok(BuildResult {
        output: CcpgOutput {
            components,
            edges,
            layers: layer_of,
            ci_total: total.total_queries,
            ci_unique: total.unique_queries,
            phases: PhaseCounters {
                prefix: after_prefix.since(&start),
                split: after_split.since(&after_prefix),
                edges: end.since(&after_split),
            },
        },
        steps: chain.steps,
    })
}
