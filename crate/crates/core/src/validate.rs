//! Ground-truth checks for learned partitions, verifying intervention sets,
//! and randomized probes of the proxy v-structure / Meek-1 statements.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builder::CcpgOutput;
use crate::ci::{CiOracle, CiTest};
use crate::error::{Error, Result};
use crate::graph::{Dag, Intervention};
use crate::vertex_set::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseResult {
    pub clause: &'static str,
    pub passed: bool,
    /// Human-readable counterexamples, empty when the clause holds.
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub clauses: Vec<ClauseResult>,
}

impl ValidationReport {
    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == name)
    }

    pub fn failing(&self) -> impl Iterator<Item = &ClauseResult> {
        self.clauses.iter().filter(|c| !c.passed)
    }
}

pub const SINGLE_SOURCE: &str = "single_source";
pub const COVERED_EDGE: &str = "covered_edge";
pub const ABSENT_EDGES: &str = "absent_edges";
pub const EDGE_INTO_SOURCE: &str = "edge_into_source";
pub const TOPOLOGICAL: &str = "topological";
pub const PREFIX_CHAIN: &str = "prefix_chain";

fn clause(name: &'static str, witnesses: Vec<String>) -> ClauseResult {
    ClauseResult { clause: name, passed: witnesses.is_empty(), witnesses }
}

/// True iff `|I ∩ {u, v}| = 1` for some intervention.
pub fn edge_is_intervened(u: usize, v: usize, interventions: &[Intervention]) -> bool {
    interventions
        .iter()
        .any(|i| i.targets.contains(u) != i.targets.contains(v))
}

/// Every covered edge is cut by some intervention.
pub fn is_verifying_set(g: &Dag, interventions: &[Intervention]) -> bool {
    g.covered_edges()
        .into_iter()
        .all(|(u, v)| edge_is_intervened(u, v, interventions))
}

/// Checks every clause of the (I-)CCPG definition against the true graph.
pub fn check_ccpg(
    g: &Dag,
    out: &CcpgOutput,
    interventions: Option<&[Intervention]>,
) -> Result<ValidationReport> {
    let owner = out.component_of(g.n())?;
    let k = out.components.len();
    if out.layers.len() != k {
        return Err(Error::Argument(format!("{} layer labels for {k} components", out.layers.len())));
    }
    if let Some(&(i, j)) = out.edges.iter().find(|&&(i, j)| i >= k || j >= k) {
        return Err(Error::Argument(format!("edge {i} -> {j} outside {k} components")));
    }
    let ints = interventions.unwrap_or(&[]);
    let dag_edges: BTreeSet<(usize, usize)> = out.edges.iter().copied().collect();

    let mut sources = Vec::with_capacity(k);
    let mut bad_src = Vec::new();
    for (i, c) in out.components.iter().enumerate() {
        let src = g.src_of(c)?;
        if src.len() != 1 {
            bad_src.push(format!("component {i} {c:?} has sources {src:?}"));
        }
        sources.push(src);
    }

    let mut bad_cover = Vec::new();
    for (i, c) in out.components.iter().enumerate() {
        if c.len() < 2 {
            continue;
        }
        let ok = g.covered_edges().into_iter().any(|(u, v)| {
            c.contains(u) && c.contains(v) && !edge_is_intervened(u, v, ints)
        });
        if !ok {
            let what = if ints.is_empty() { "covered" } else { "unintervened covered" };
            bad_cover.push(format!("component {i} {c:?} has no {what} edge"));
        }
    }

    let mut bad_absent = Vec::new();
    for &(u, v) in g.edges() {
        let (i, j) = (owner[u], owner[v]);
        if i != j && !dag_edges.contains(&(i, j)) {
            bad_absent.push(format!("graph edge {u} -> {v} but no component edge {i} -> {j}"));
        }
    }

    let mut bad_into_src = Vec::new();
    for &(i, j) in &out.edges {
        let hit = sources[j].iter().any(|s| {
            g.parents(s).map(|pa| !pa.is_disjoint(&out.components[i])).unwrap_or(false)
        });
        if !hit || sources[j].len() != 1 {
            bad_into_src.push(format!("component edge {i} -> {j} without a parent of src(V_{j}) in V_{i}"));
        }
    }

    let bad_topo: Vec<String> = out
        .edges
        .iter()
        .filter(|(i, j)| i >= j)
        .map(|(i, j)| format!("component edge {i} -> {j} runs backwards"))
        .collect();

    let mut bad_prefix = Vec::new();
    if out.layers.windows(2).any(|w| w[0] > w[1]) {
        bad_prefix.push(format!("layer labels {:?} are not non-decreasing", out.layers));
    }
    for t in 0..out.num_layers() {
        let cum = out.cumulative_layer(t);
        if !g.is_prefix_set(&cum)? {
            bad_prefix.push(format!("layers 0..={t} {cum:?} are not a prefix set"));
        }
    }

    let clauses = vec![
        clause(SINGLE_SOURCE, bad_src),
        clause(COVERED_EDGE, bad_cover),
        clause(ABSENT_EDGES, bad_absent),
        clause(EDGE_INTO_SOURCE, bad_into_src),
        clause(TOPOLOGICAL, bad_topo),
        clause(PREFIX_CHAIN, bad_prefix),
    ];
    Ok(ValidationReport { passed: clauses.iter().all(|c| c.passed), clauses })
}

/// The all-singletons representation with `𝒟 = 𝒢`, components in the
/// graph's topological order, one layer per component.
pub fn singleton_ccpg(g: &Dag) -> CcpgOutput {
    let order = g.topological_order();
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v)| (pos[u], pos[v])).collect();
    edges.sort_unstable();
    CcpgOutput {
        components: order.iter().map(|&v| VertexSet::singleton(v)).collect(),
        edges,
        layers: (0..g.n()).collect(),
        ci_total: 0,
        ci_unique: 0,
        phases: Default::default(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProbeOutcome {
    pub trials: usize,
    /// Trials whose CI premises held.
    pub qualifying: usize,
    pub violations: usize,
}

/// Random topological order: Kahn's algorithm with a uniformly random
/// choice among ready vertices.
pub fn random_topological_order(g: &Dag, rng: &mut impl Rng) -> Vec<usize> {
    let n = g.n();
    let mut indeg: Vec<usize> = (0..n).map(|v| g.parents(v).map_or(0, VertexSet::len)).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        let v = ready.swap_remove(rng.random_range(0..ready.len()));
        order.push(v);
        for c in g.children(v).expect("vertex in range") {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(c);
            }
        }
    }
    order
}

/// Samples `(S, u, v, z)` with `u, v, z ∉ S` and counts how often
/// `u ⫫ v | S`, `u ⊥̸ v | S ∪ {z}` coexist with `u` or `v` in `Des[z]`.
pub fn proxy_vstructure_probe<T: CiTest>(
    g: &Dag,
    oracle: &mut CiOracle<T>,
    trials: usize,
    seed: u64,
) -> Result<ProbeOutcome> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ProbeOutcome { trials, ..Default::default() };
    for _ in 0..trials {
        let s: VertexSet = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        let mut rest = s.complement(n).to_vec();
        if rest.len() < 3 {
            continue;
        }
        rest.shuffle(&mut rng);
        let (u, v, z) = (rest[0], rest[1], rest[2]);
        if oracle.indep(u, v, &s)? && oracle.dep(u, v, &s.with(z))? {
            out.qualifying += 1;
            let des_z = g.des_closed(&VertexSet::singleton(z))?;
            if des_z.contains(u) || des_z.contains(v) {
                out.violations += 1;
            }
        }
    }
    Ok(out)
}

/// Samples a prefix `S` (a random-length head of a random topological
/// order), `u ∈ S` and `v, w ∉ S`; counts cases where `u ⊥̸ v | S`,
/// `u ⫫ w | S ∪ {v}` hold but `v ∈ Des[w]`.
pub fn proxy_meek1_probe<T: CiTest>(
    g: &Dag,
    oracle: &mut CiOracle<T>,
    trials: usize,
    seed: u64,
) -> Result<ProbeOutcome> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ProbeOutcome { trials, ..Default::default() };
    if n < 3 {
        return Ok(out);
    }
    for _ in 0..trials {
        let order = random_topological_order(g, &mut rng);
        let cut = rng.random_range(1..=n - 2);
        let (head, tail) = order.split_at(cut);
        let s: VertexSet = head.iter().copied().collect();
        let u = *head.choose(&mut rng).expect("nonempty head");
        let picked: Vec<usize> = tail.choose_multiple(&mut rng, 2).copied().collect();
        let (v, w) = (picked[0], picked[1]);
        if oracle.dep(u, v, &s)? && oracle.indep(u, w, &s.with(v))? {
            out.qualifying += 1;
            if g.des_closed(&VertexSet::singleton(w))?.contains(v) {
                out.violations += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::DsepTester;

    fn set<const N: usize>(items: [usize; N]) -> VertexSet {
        VertexSet::from(items)
    }

    fn output(components: Vec<VertexSet>, edges: Vec<(usize, usize)>, layers: Vec<usize>) -> CcpgOutput {
        CcpgOutput { components, edges, layers, ci_total: 0, ci_unique: 0, phases: Default::default() }
    }

    fn chain3() -> Dag {
        Dag::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn singleton_partition_is_valid() {
        let g = Dag::new(5, [(0, 2), (1, 2), (2, 3), (0, 4), (3, 4)]).unwrap();
        let report = check_ccpg(&g, &singleton_ccpg(&g), None).unwrap();
        assert!(report.passed, "{report:?}");
        let ints = vec![Intervention::new(0, [0, 1, 2])];
        assert!(check_ccpg(&g, &singleton_ccpg(&g), Some(&ints)).unwrap().passed);
    }

    #[test]
    fn chain_as_one_component_is_valid() {
        let out = output(vec![set([0, 1, 2])], vec![], vec![0]);
        assert!(check_ccpg(&chain3(), &out, None).unwrap().passed);
        // Cutting the only covered edge breaks the strong condition.
        let ints = vec![Intervention::new(0, [0])];
        let report = check_ccpg(&chain3(), &out, Some(&ints)).unwrap();
        assert!(!report.clause(COVERED_EDGE).unwrap().passed);
    }

    #[test]
    fn uncovered_component_fails() {
        let out = output(vec![set([0]), set([1, 2])], vec![(0, 1)], vec![0, 1]);
        let report = check_ccpg(&chain3(), &out, None).unwrap();
        assert!(!report.passed);
        let failing: Vec<&str> = report.failing().map(|c| c.clause).collect();
        assert_eq!(failing, vec![COVERED_EDGE]);
    }

    #[test]
    fn each_consistency_clause_can_fail() {
        let g = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        let good = output(vec![set([0]), set([1]), set([2])], vec![(0, 2), (1, 2)], vec![0, 0, 1]);
        assert!(check_ccpg(&g, &good, None).unwrap().passed);

        let missing = output(good.components.clone(), vec![(0, 2)], good.layers.clone());
        assert!(!check_ccpg(&g, &missing, None).unwrap().clause(ABSENT_EDGES).unwrap().passed);
        let extra = output(good.components.clone(), vec![(0, 1), (0, 2), (1, 2)], good.layers.clone());
        assert!(!check_ccpg(&g, &extra, None).unwrap().clause(EDGE_INTO_SOURCE).unwrap().passed);
        let backwards = output(vec![set([2]), set([0]), set([1])], vec![(1, 0), (2, 0)], vec![0, 0, 0]);
        let r = check_ccpg(&g, &backwards, None).unwrap();
        assert_eq!(r.failing().map(|c| c.clause).collect::<Vec<_>>(), vec![TOPOLOGICAL]);
        let two_sources = output(vec![set([0, 1]), set([2])], vec![(0, 1)], vec![0, 1]);
        assert!(!check_ccpg(&g, &two_sources, None).unwrap().clause(SINGLE_SOURCE).unwrap().passed);
    }

    #[test]
    fn partition_mismatch_is_an_error() {
        let out = output(vec![set([0, 1])], vec![], vec![0]);
        assert!(matches!(check_ccpg(&chain3(), &out, None), Err(Error::Argument(_))));
        let dup = output(vec![set([0, 1]), set([1, 2])], vec![], vec![0, 0]);
        assert!(check_ccpg(&chain3(), &dup, None).is_err());
    }

    #[test]
    fn verifying_sets() {
        let star = Dag::new(4, [(0, 3), (1, 3), (2, 3)]).unwrap();
        assert!(is_verifying_set(&star, &[]));
        let edge = Dag::new(2, [(0, 1)]).unwrap();
        assert!(is_verifying_set(&edge, &[Intervention::new(0, [0])]));
        assert!(!is_verifying_set(&edge, &[Intervention::new(0, [0, 1])]));
        assert!(!is_verifying_set(&edge, &[]));
    }

    #[test]
    fn probe_examples() {
        let star = Dag::new(4, [(0, 3), (1, 3), (2, 3)]).unwrap();
        let mut o = CiOracle::new(DsepTester::observational(star.clone()));
        assert!(o.indep(0, 1, &VertexSet::new()).unwrap() && o.dep(0, 1, &set([3])).unwrap());
        let r = proxy_vstructure_probe(&star, &mut o, 500, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.qualifying > 0);

        let complete = Dag::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut c = CiOracle::new(DsepTester::observational(complete.clone()));
        let r = proxy_vstructure_probe(&complete, &mut c, 200, 2).unwrap();
        assert_eq!((r.qualifying, r.violations), (0, 0));

        let chain = chain3();
        let mut m = CiOracle::new(DsepTester::observational(chain.clone()));
        assert!(m.dep(0, 1, &set([0])).unwrap() && m.indep(0, 2, &set([0, 1])).unwrap());
        let r = proxy_meek1_probe(&chain, &mut m, 200, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.qualifying > 0);

        let two = Dag::new(2, [(0, 1)]).unwrap();
        let mut t = CiOracle::new(DsepTester::observational(two.clone()));
        assert_eq!(proxy_meek1_probe(&two, &mut t, 10, 0).unwrap().qualifying, 0);
    }
}
