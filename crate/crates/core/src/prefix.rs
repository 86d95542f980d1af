//! Growing a prefix vertex set `S ⊊ S'` from CI queries alone.
//!
//! Given a prefix set `S`, four kinds of vertices of `S̄ = V \ S` are ruled
//! out as possible members of the next prefix layer:
//!
//! * type I (`D`): `w` such that some `u ∈ V`, `v ∈ S̄` satisfy
//!   `u ⫫ v | S` and `u ⊥̸ v | S ∪ {w}`;
//! * type II (`E`): `w ∈ S̄ \ D` such that some `u ∈ S`, `v, v' ∈ S̄ \ D`
//!   satisfy `u ⫫ v' | S ∪ {v}` and `u ⊥̸ v' | S ∪ {v, w}`;
//! * type III (`F`): `w ∈ S̄ \ D` such that some `u ∈ S`, `v ∈ S̄ \ D`
//!   satisfy `u ⊥̸ v | S`, `u ⫫ w | S ∪ {v}` and `v ⊥̸ w | S`;
//! * type IV (`J^I`, per intervention): descendants of the unabsorbed
//!   targets, targets that still have an ancestor outside `S`, and targets
//!   lying below a non-target descendant.
//!
//! All witness variables are mutually distinct. Every loop runs in
//! ascending vertex order and stops at the first witness, so traces are
//! reproducible.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ci::{CiCounter, CiOracle, CiTest, Regime};
use crate::error::{Error, Result};
use crate::graph::Intervention;
use crate::vertex_set::VertexSet;

/// First witnesses found for each excluded vertex.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Witnesses {
    /// `w -> (u, v)`.
    pub d: BTreeMap<usize, (usize, usize)>,
    /// `w -> (u, v, v')`.
    pub e: BTreeMap<usize, (usize, usize, usize)>,
    /// `w -> (u, v)`.
    pub f: BTreeMap<usize, (usize, usize)>,
    /// intervention id -> target `v -> H(v)` for targets excluded by the
    /// ancestor clause.
    pub h: BTreeMap<usize, BTreeMap<usize, VertexSet>>,
    /// intervention id -> target `t -> q` for targets found below a
    /// non-target descendant `q`.
    pub below: BTreeMap<usize, BTreeMap<usize, usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrefixStepTrace {
    pub input_prefix: VertexSet,
    pub d_set: VertexSet,
    pub e_set: VertexSet,
    pub f_set: VertexSet,
    /// Intervention id -> `J^I`.
    pub j_sets: BTreeMap<usize, VertexSet>,
    pub output_prefix: VertexSet,
    pub queries_used: CiCounter,
    pub witnesses: Witnesses,
}

impl PrefixStepTrace {
    /// Union of every exclusion set.
    pub fn excluded(&self) -> VertexSet {
        let mut all = self.d_set.union(&self.e_set).union(&self.f_set);
        for j in self.j_sets.values() {
            all.union_with(j);
        }
        all
    }
}

fn check_prefix_arg<T: CiTest>(oracle: &CiOracle<T>, s: &VertexSet) -> Result<()> {
    let n = oracle.n();
    if s.bound() > n {
        return Err(Error::VertexOutOfRange { vertex: s.bound() - 1, n });
    }
    Ok(())
}

fn type1_detail<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
) -> Result<BTreeMap<usize, (usize, usize)>> {
    let n = oracle.n();
    let rest = s.complement(n);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in &rest {
            if u != v && oracle.indep(u, v, s)? {
                pairs.push((u, v));
            }
        }
    }
    let mut found = BTreeMap::new();
    for w in &rest {
        let cond = s.with(w);
        for &(u, v) in &pairs {
            if u != w && v != w && oracle.dep(u, v, &cond)? {
                found.insert(w, (u, v));
                break;
            }
        }
    }
    Ok(found)
}

/// Type-I set `D_S`.
pub fn type1_set<T: CiTest>(oracle: &mut CiOracle<T>, s: &VertexSet) -> Result<VertexSet> {
    check_prefix_arg(oracle, s)?;
    Ok(type1_detail(oracle, s)?.into_keys().collect())
}

fn type2_detail<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    d: &VertexSet,
) -> Result<BTreeMap<usize, (usize, usize, usize)>> {
    let rest = s.complement(oracle.n()).difference(d);
    let mut triples = Vec::new();
    for u in s {
        for v in &rest {
            let cond = s.with(v);
            for v2 in &rest {
                if v2 != v && oracle.indep(u, v2, &cond)? {
                    triples.push((u, v, v2));
                }
            }
        }
    }
    let mut found = BTreeMap::new();
    for w in &rest {
        for &(u, v, v2) in &triples {
            if v == w || v2 == w {
                continue;
            }
            if oracle.dep(u, v2, &s.with(v).with(w))? {
                found.insert(w, (u, v, v2));
                break;
            }
        }
    }
    Ok(found)
}

/// Type-II set `E_S`; `d` must be `D_S`.
pub fn type2_set<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    d: &VertexSet,
) -> Result<VertexSet> {
    check_prefix_arg(oracle, s)?;
    Ok(type2_detail(oracle, s, d)?.into_keys().collect())
}

fn type3_detail<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    d: &VertexSet,
) -> Result<BTreeMap<usize, (usize, usize)>> {
    let rest = s.complement(oracle.n()).difference(d);
    let mut pairs = Vec::new();
    for u in s {
        for v in &rest {
            if oracle.dep(u, v, s)? {
                pairs.push((u, v));
            }
        }
    }
    let mut found = BTreeMap::new();
    for w in &rest {
        for &(u, v) in &pairs {
            if v == w {
                continue;
            }
            if oracle.indep(u, w, &s.with(v))? && oracle.dep(v, w, s)? {
                found.insert(w, (u, v));
                break;
            }
        }
    }
    Ok(found)
}

/// Type-III set `F_S`; `d` must be `D_S`.
pub fn type3_set<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    d: &VertexSet,
) -> Result<VertexSet> {
    check_prefix_arg(oracle, s)?;
    Ok(type3_detail(oracle, s, d)?.into_keys().collect())
}

/// One observational prefix step: `S' = S ∪ (S̄ \ (D ∪ E ∪ F))`.
pub fn learn_prefix<T: CiTest>(oracle: &mut CiOracle<T>, s: &VertexSet) -> Result<PrefixStepTrace> {
    learn_prefix_int(oracle, s, &[])
}

/// Targets of `I` not yet absorbed into `S`.
fn open_targets(s: &VertexSet, intervention: &Intervention) -> VertexSet {
    intervention.targets.difference(s)
}

/// `Des(I \ S) \ (I \ S)`: vertices outside `I` marginally dependent on some
/// open target in the regime of `I`.
pub fn interventional_descendants<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    intervention: &Intervention,
) -> Result<VertexSet> {
    Ok(target_roots(oracle, s, intervention)?.into_keys().collect())
}

/// For each non-target `u ∉ S` that depends on some open target under the
/// intervention, the set of open targets it depends on.
fn target_roots<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    intervention: &Intervention,
) -> Result<BTreeMap<usize, VertexSet>> {
    check_prefix_arg(oracle, s)?;
    let regime = Regime::Intervention(intervention.id);
    if !oracle.supports(regime) {
        return Err(Error::UnknownRegime(regime));
    }
    let open = open_targets(s, intervention);
    let candidates = s.complement(oracle.n()).difference(&intervention.targets);
    let empty = VertexSet::new();
    let mut out = BTreeMap::new();
    for u in &candidates {
        let mut roots = VertexSet::new();
        for v in &open {
            if oracle.dep_in(u, v, &empty, regime)? {
                roots.insert(v);
            }
        }
        if !roots.is_empty() {
            out.insert(u, roots);
        }
    }
    Ok(out)
}

/// `H(v) = {u ∉ S ∪ Des[I\S] : u ⊥̸ v | V \ Des[I\S]}` with `des_closed`
/// being `Des[I \ S]`.
pub fn h_set<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    intervention: &Intervention,
    v: usize,
    des_closed: &VertexSet,
) -> Result<VertexSet> {
    if !open_targets(s, intervention).contains(v) {
        return Err(Error::Argument(format!("vertex {v} is not an open target of intervention {}", intervention.id)));
    }
    let n = oracle.n();
    let cond = des_closed.complement(n);
    let candidates = cond.difference(s);
    let mut out = VertexSet::new();
    for u in &candidates {
        if oracle.dep(u, v, &cond)? {
            out.insert(u);
        }
    }
    Ok(out)
}

struct Type4 {
    j: VertexSet,
    h: BTreeMap<usize, VertexSet>,
    below: BTreeMap<usize, usize>,
}

fn type4_detail<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    intervention: &Intervention,
) -> Result<Type4> {
    let n = oracle.n();
    let open = open_targets(s, intervention);
    let roots = target_roots(oracle, s, intervention)?;
    let descendants: VertexSet = roots.keys().copied().collect();
    let des_closed = descendants.union(&open);
    let rest = s.complement(n);
    let mut j = descendants;
    let mut h = BTreeMap::new();
    for v in &open {
        let hv = h_set(oracle, s, intervention, v, &des_closed)?;
        if !hv.is_disjoint(&rest) {
            j.insert(v);
            h.insert(v, hv);
        }
    }

    // Open targets downstream of some q in Des(I \ S) \ I. Conditioning on
    // everything outside Des[I \ S] plus the targets and non-targets
    // upstream of q leaves only directed paths out of q's root class open.
    let outside = des_closed.complement(n);
    let mut below = BTreeMap::new();
    for t in &open {
        if j.contains(t) {
            continue;
        }
        for (&q, rq) in &roots {
            if rq.contains(t) {
                continue;
            }
            let mut cond = outside.union(rq);
            for (&x, rx) in &roots {
                if x != q && rx.is_subset(rq) && rx != rq {
                    cond.insert(x);
                }
            }
            if oracle.dep(q, t, &cond)? {
                below.insert(t, q);
                break;
            }
        }
    }
    j.extend(below.keys().copied());
    Ok(Type4 { j, h, below })
}

/// Type-IV set `J_S^I`.
pub fn type4_set<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    intervention: &Intervention,
) -> Result<VertexSet> {
    Ok(type4_detail(oracle, s, intervention)?.j)
}

/// One prefix step using interventional regimes as well:
/// `S' = S ∪ (S̄ \ (⋃ J^I ∪ D ∪ E ∪ F))`.
pub fn learn_prefix_int<T: CiTest>(
    oracle: &mut CiOracle<T>,
    s: &VertexSet,
    interventions: &[Intervention],
) -> Result<PrefixStepTrace> {
    check_prefix_arg(oracle, s)?;
    let n = oracle.n();
    if s.len() == n {
        return Err(Error::Argument("prefix set already covers every vertex".into()));
    }
    let before = oracle.counter();
    let mut witnesses = Witnesses::default();

    let mut j_sets = BTreeMap::new();
    for i in interventions {
        let t4 = type4_detail(oracle, s, i)?;
        j_sets.insert(i.id, t4.j);
        if !t4.h.is_empty() {
            witnesses.h.insert(i.id, t4.h);
        }
        if !t4.below.is_empty() {
            witnesses.below.insert(i.id, t4.below);
        }
    }

    witnesses.d = type1_detail(oracle, s)?;
    let d_set: VertexSet = witnesses.d.keys().copied().collect();
    witnesses.e = type2_detail(oracle, s, &d_set)?;
    witnesses.f = type3_detail(oracle, s, &d_set)?;
    let e_set = witnesses.e.keys().copied().collect();
    let f_set = witnesses.f.keys().copied().collect();

    let mut trace = PrefixStepTrace {
        input_prefix: s.clone(),
        d_set,
        e_set,
        f_set,
        j_sets,
        output_prefix: VertexSet::new(),
        queries_used: CiCounter::default(),
        witnesses,
    };
    let admitted = s.complement(n).difference(&trace.excluded());
    if admitted.is_empty() {
        return Err(Error::Stall { prefix_len: s.len(), n });
    }
    trace.output_prefix = s.union(&admitted);
    trace.queries_used = oracle.counter().since(&before);
    Ok(trace)
}
