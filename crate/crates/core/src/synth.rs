//! Synthetic ground truth: random DAGs, linear-Gaussian SEMs and their
//! observational or hard-intervened samples, plus verifying intervention
//! sets.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ci::Regime;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{interventions_from_targets, Dag, Intervention};
use crate::vertex_set::VertexSet;

/// Erdős–Rényi DAG: a uniform random vertex order, then each forward pair
/// independently with probability `edge_prob`.
pub fn random_dag(n: usize, edge_prob: f64, seed: u64) -> Result<Dag> {
    if n == 0 {
        return Err(Error::Argument("random_dag needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::Argument(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Dag::new(n, edges)
}

/// Leaves `0..n-1` all pointing into `n - 1`.
pub fn in_star(n: usize) -> Dag {
    let center = n.saturating_sub(1);
    Dag::new(n, (0..center).map(|leaf| (leaf, center))).expect("star is acyclic")
}

/// `0 → 1 → … → n-1`.
pub fn chain(n: usize) -> Dag {
    Dag::new(n, (1..n).map(|v| (v - 1, v))).expect("chain is acyclic")
}

/// `x_v = Σ_{u ∈ Pa(v)} w_uv x_u + ε_v` with `ε_v ~ N(0, noise_std_v²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemModel {
    dag: Dag,
    /// Aligned with `dag.edges()`.
    weights: Vec<f64>,
    noise_std: Vec<f64>,
}

impl SemModel {
    pub fn new(dag: Dag, weights: Vec<f64>, noise_std: Vec<f64>) -> Result<Self> {
        if weights.len() != dag.edges().len() {
            return Err(Error::Argument(format!(
                "{} weights for {} edges",
                weights.len(),
                dag.edges().len()
            )));
        }
        if noise_std.len() != dag.n() || noise_std.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Argument("noise_std needs one positive entry per vertex".into()));
        }
        Ok(Self { dag, weights, noise_std })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn noise_std(&self) -> &[f64] {
        &self.noise_std
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.dag
            .edges()
            .binary_search(&(u, v))
            .ok()
            .map(|i| self.weights[i])
    }

    /// `(u, v, w_uv)` in edge order.
    pub fn weighted_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.dag.edges().iter().zip(&self.weights).map(|(&(u, v), &w)| (u, v, w))
    }

    /// Model covariance `(I - B)⁻ᵀ Ω (I - B)⁻¹` where `B[u][v] = w_uv`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.dag.n();
        let mut b = DMatrix::zeros(n, n);
        for (u, v, w) in self.weighted_edges() {
            b[(u, v)] = w;
        }
        let a = (DMatrix::identity(n, n) - b)
            .try_inverse()
            .expect("I - B is unit triangular after permutation");
        let omega = DMatrix::from_fn(n, n, |i, j| if i == j { self.noise_std[i].powi(2) } else { 0.0 });
        a.transpose() * omega * a
    }

    pub fn to_json(&self) -> SemJson {
        SemJson {
            n: self.dag.n(),
            edges: self.dag.edges().iter().map(|&(u, v)| [u, v]).collect(),
            weights: self.weights.clone(),
            noise_std: self.noise_std.clone(),
        }
    }
}

/// `{"n": .., "edges": [[u, v]], "weights": [..], "noise_std": [..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub weights: Vec<f64>,
    pub noise_std: Vec<f64>,
}

impl SemJson {
    pub fn into_model(self) -> Result<SemModel> {
        let mut pairs: Vec<((usize, usize), f64)> = self
            .edges
            .iter()
            .map(|e| (e[0], e[1]))
            .zip(self.weights.iter().copied())
            .collect();
        if pairs.len() != self.edges.len() || self.weights.len() != self.edges.len() {
            return Err(Error::Input("sem.json: weights and edges differ in length".into()));
        }
        pairs.sort_by_key(|p| p.0);
        let dag = Dag::new(self.n, pairs.iter().map(|p| p.0))?;
        SemModel::new(dag, pairs.into_iter().map(|p| p.1).collect(), self.noise_std)
    }
}

/// Each weight uniform on `±[weight_low, weight_high]` with a fair sign;
/// unit noise.
pub fn random_sem(g: &Dag, weight_low: f64, weight_high: f64, seed: u64) -> Result<SemModel> {
    if !(weight_low > 0.0 && weight_low <= weight_high) {
        return Err(Error::Argument(format!(
            "need 0 < weight_low <= weight_high, got [{weight_low}, {weight_high}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = g
        .edges()
        .iter()
        .map(|_| {
            let magnitude = if weight_low == weight_high {
                weight_low
            } else {
                rng.random_range(weight_low..weight_high)
            };
            if rng.random_bool(0.5) {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();
    SemModel::new(g.clone(), weights, vec![1.0; g.n()])
}

pub const DEFAULT_WEIGHT_RANGE: (f64, f64) = (0.5, 1.5);

fn ancestral_sample(
    model: &SemModel,
    targets: &VertexSet,
    regime: Regime,
    m: usize,
    seed: u64,
) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::SampleSize { needed: 1, have: 0 });
    }
    let g = &model.dag;
    let n = g.n();
    let parents: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|v| {
            g.parents(v)
                .expect("vertex in range")
                .iter()
                .map(|u| (u, model.weight(u, v).expect("edge has a weight")))
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = DMatrix::zeros(m, n);
    let mut row = vec![0.0; n];
    for r in 0..m {
        for &v in g.topological_order() {
            let noise: f64 = StandardNormal.sample(&mut rng);
            row[v] = if targets.contains(v) {
                noise
            } else {
                parents[v].iter().map(|&(u, w)| w * row[u]).sum::<f64>() + model.noise_std[v] * noise
            };
        }
        for (c, &x) in row.iter().enumerate() {
            samples[(r, c)] = x;
        }
    }
    Dataset::new(regime, samples, Some(seed))
}

/// Observational samples by ancestral sampling.
pub fn sample(model: &SemModel, m: usize, seed: u64) -> Result<Dataset> {
    ancestral_sample(model, &VertexSet::new(), Regime::Observational, m, seed)
}

/// Samples under a hard intervention: each target is replaced by an
/// independent standard normal.
pub fn sample_intervened(
    model: &SemModel,
    intervention: &Intervention,
    m: usize,
    seed: u64,
) -> Result<Dataset> {
    model.dag.check_set(&intervention.targets)?;
    ancestral_sample(model, &intervention.targets, Regime::Intervention(intervention.id), m, seed)
}

/// `{u}` for the tail `u` of every covered edge, deduplicated, ascending.
pub fn covered_edge_verifying_set(g: &Dag) -> Vec<Intervention> {
    let mut tails: Vec<usize> = g.covered_edges().into_iter().map(|(u, _)| u).collect();
    tails.dedup();
    tails.sort_unstable();
    tails.dedup();
    interventions_from_targets(tails.into_iter().map(VertexSet::singleton))
}

/// `⌈log₂ n⌉` interventions; the `b`-th targets every vertex whose bit `b`
/// is set, so any two distinct vertices are split by at least one of them.
pub fn log2_intervention_set(n: usize) -> Vec<Intervention> {
    let bits = if n <= 1 { 0 } else { usize::BITS - (n - 1).leading_zeros() } as usize;
    interventions_from_targets(
        (0..bits).map(|b| (0..n).filter(|v| v >> b & 1 == 1).collect::<VertexSet>()),
    )
}
