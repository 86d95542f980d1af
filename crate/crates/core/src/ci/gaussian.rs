//! Fisher-z partial-correlation tester for linear-Gaussian data.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{CiQuery, CiTest, Regime};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::Intervention;
use crate::vertex_set::VertexSet;

const CLAMP: f64 = 1.0 - 1e-12;
const RIDGE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianTesterConfig {
    pub alpha: f64,
    pub min_samples: usize,
    /// Divide alpha by `|A|·|B|` for set-level queries.
    pub bonferroni: bool,
}

impl Default for GaussianTesterConfig {
    fn default() -> Self {
        Self { alpha: 0.01, min_samples: 10, bonferroni: false }
    }
}

impl GaussianTesterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Argument(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FisherZOutcome {
    pub dependent: bool,
    pub statistic: f64,
    /// `|r|` was at least 1 and got pulled inside the open interval.
    pub clamped: bool,
}

/// Dependent iff `sqrt(m - c - 3) · |atanh(r)| > Φ⁻¹(1 - alpha/2)`.
pub fn fisher_z_decision(r: f64, m: usize, c: usize, alpha: f64) -> Result<FisherZOutcome> {
    if m < c + 4 {
        return Err(Error::SampleSize { needed: c + 4, have: m });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Argument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if r.is_nan() {
        return Err(Error::Numerical("partial correlation is NaN".into()));
    }
    let clamped = r.abs() >= 1.0;
    let r = r.clamp(-CLAMP, CLAMP);
    let statistic = ((m - c - 3) as f64).sqrt() * r.atanh().abs();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let threshold = normal.inverse_cdf(1.0 - alpha / 2.0);
    Ok(FisherZOutcome { dependent: statistic > threshold, statistic, clamped })
}

/// Partial correlation of `a` and `b` given `cond` from a covariance (or
/// correlation) matrix: `-P_ab / sqrt(P_aa P_bb)` with `P` the inverse of
/// the submatrix over `{a, b} ∪ cond`.
pub fn partial_correlation(cov: &DMatrix<f64>, a: usize, b: usize, cond: &VertexSet) -> Result<f64> {
    let n = cov.nrows();
    if a == b {
        return Err(Error::Argument("partial correlation of a variable with itself".into()));
    }
    let mut idx = vec![a, b];
    idx.extend(cond.iter().filter(|&c| c != a && c != b));
    if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
        return Err(Error::VertexOutOfRange { vertex: bad, n });
    }
    let k = idx.len();
    let sub = DMatrix::from_fn(k, k, |i, j| cov[(idx[i], idx[j])]);
    let precision = match sub.clone().try_inverse() {
        Some(p) if p.iter().all(|x| x.is_finite()) => p,
        _ => {
            let ridged = sub + DMatrix::identity(k, k) * RIDGE;
            ridged
                .try_inverse()
                .filter(|p| p.iter().all(|x| x.is_finite()))
                .ok_or_else(|| Error::Numerical(format!("singular covariance over {idx:?}")))?
        }
    };
    let denom = (precision[(0, 0)] * precision[(1, 1)]).sqrt();
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::Numerical(format!("degenerate precision over {idx:?}")));
    }
    Ok((-precision[(0, 1)] / denom).clamp(-1.0, 1.0))
}

/// Partial correlation straight from samples; needs `m ≥ |cond| + 4`.
pub fn partial_correlation_of(data: &Dataset, a: usize, b: usize, cond: &VertexSet) -> Result<f64> {
    let c = cond.without(a).without(b).len();
    if data.m() < c + 4 {
        return Err(Error::SampleSize { needed: c + 4, have: data.m() });
    }
    partial_correlation(&data.covariance(), a, b, cond)
}

/// Covariance summary of one regime's samples.
#[derive(Clone, Debug)]
pub struct RegimeStats {
    pub covariance: DMatrix<f64>,
    pub m: usize,
}

impl RegimeStats {
    pub fn from_dataset(data: &Dataset) -> Self {
        Self { covariance: data.covariance(), m: data.m() }
    }
}

/// Set-level decision: dependent iff some pair in `A × B` tests dependent
/// given `C \ (A ∪ B)`. Pairs are visited in ascending order and the loop
/// stops at the first dependent pair.
pub fn set_dependent_sampled(
    stats: &RegimeStats,
    a: &VertexSet,
    b: &VertexSet,
    cond: &VertexSet,
    cfg: &GaussianTesterConfig,
) -> Result<bool> {
    if a.is_empty() || b.is_empty() || !a.is_disjoint(b) {
        return Err(Error::Argument("set-level test needs disjoint nonempty sides".into()));
    }
    let cond = cond.difference(&a.union(b));
    let alpha = if cfg.bonferroni {
        cfg.alpha / (a.len() * b.len()) as f64
    } else {
        cfg.alpha
    };
    for x in a {
        for y in b {
            let r = partial_correlation(&stats.covariance, x, y, &cond)?;
            if fisher_z_decision(r, stats.m, cond.len(), alpha)?.dependent {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Sample-based [`CiTest`]: each regime is answered from its own data only.
#[derive(Clone, Debug)]
pub struct GaussianTester {
    n: usize,
    cfg: GaussianTesterConfig,
    regimes: BTreeMap<Regime, RegimeStats>,
}

impl GaussianTester {
    pub fn new(
        observational: &Dataset,
        interventional: &[(Intervention, Dataset)],
        cfg: GaussianTesterConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let n = observational.n();
        let mut regimes = BTreeMap::new();
        let all = std::iter::once((Regime::Observational, observational))
            .chain(interventional.iter().map(|(i, d)| (Regime::Intervention(i.id), d)));
        for (regime, data) in all {
            if data.n() != n {
                return Err(Error::Input(format!(
                    "regime {regime:?} has {} columns, expected {n}",
                    data.n()
                )));
            }
            if data.m() < cfg.min_samples {
                return Err(Error::SampleSize { needed: cfg.min_samples, have: data.m() });
            }
            if regimes.insert(regime, RegimeStats::from_dataset(data)).is_some() {
                return Err(Error::Argument(format!("duplicate regime {regime:?}")));
            }
        }
        Ok(Self { n, cfg, regimes })
    }

    pub fn config(&self) -> &GaussianTesterConfig {
        &self.cfg
    }

    pub fn stats(&self, regime: Regime) -> Result<&RegimeStats> {
        self.regimes.get(&regime).ok_or(Error::UnknownRegime(regime))
    }
}

impl CiTest for GaussianTester {
    fn n(&self) -> usize {
        self.n
    }

    fn supports(&self, regime: Regime) -> bool {
        self.regimes.contains_key(&regime)
    }

    fn dependent(&self, query: &CiQuery) -> Result<bool> {
        let stats = self.stats(query.regime())?;
        set_dependent_sampled(stats, query.a(), query.b(), query.cond(), &self.cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn dataset(m: usize, n: usize, seed: u64, f: impl Fn(&[f64]) -> Vec<f64>) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(m * n);
        for _ in 0..m {
            let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            values.extend(f(&z));
        }
        Dataset::new(Regime::Observational, DMatrix::from_row_slice(m, n, &values), Some(seed)).unwrap()
    }

    #[test]
    fn fisher_z_examples() {
        assert!(!fisher_z_decision(0.0, 50, 3, 0.05).unwrap().dependent);
        let strong = fisher_z_decision(0.9, 100, 0, 0.01).unwrap();
        assert!(strong.dependent);
        // atanh(0.9) * sqrt(97)
        assert!((strong.statistic - 1.4722194895832204 * 97f64.sqrt()).abs() < 1e-9);
        assert!((strong.statistic - 14.50).abs() < 0.01);
        let weak = fisher_z_decision(0.02, 100, 0, 0.01).unwrap();
        assert!(!weak.dependent);
        assert!((weak.statistic - 0.197).abs() < 1e-3);
    }

    #[test]
    fn fisher_z_edge_cases() {
        assert!(matches!(fisher_z_decision(0.5, 5, 2, 0.01), Err(Error::SampleSize { needed: 6, have: 5 })));
        assert!(fisher_z_decision(0.5, 6, 2, 0.01).is_ok());
        let c = fisher_z_decision(1.0, 100, 0, 0.01).unwrap();
        assert!(c.clamped && c.dependent && c.statistic.is_finite());
        assert!(fisher_z_decision(0.5, 100, 0, 1.0).is_err());
    }

    #[test]
    fn empty_conditioning_gives_pearson() {
        let d = dataset(500, 2, 3, |z| vec![z[0], 0.5 * z[0] + z[1]]);
        let r = partial_correlation_of(&d, 0, 1, &VertexSet::new()).unwrap();
        let cov = d.covariance();
        let pearson = cov[(0, 1)] / (cov[(0, 0)] * cov[(1, 1)]).sqrt();
        assert!((r - pearson).abs() < 1e-12);
    }

    #[test]
    fn identical_columns_hit_the_ridge() {
        let d = dataset(200, 3, 4, |z| vec![z[0], z[0], z[1]]);
        let r = partial_correlation_of(&d, 0, 1, &VertexSet::from([2])).unwrap();
        assert!(r > 0.999);
    }

    #[test]
    fn independent_normals_have_small_correlation() {
        let d = dataset(10_000, 2, 11, |z| z.to_vec());
        assert!(partial_correlation_of(&d, 0, 1, &VertexSet::new()).unwrap().abs() < 0.05);
    }

    #[test]
    fn conditioning_removes_chain_dependence() {
        let d = dataset(20_000, 3, 5, |z| {
            let x0 = z[0];
            let x1 = x0 + z[1];
            vec![x0, x1, x1 + z[2]]
        });
        assert!(partial_correlation_of(&d, 0, 2, &VertexSet::from([1])).unwrap().abs() < 0.03);
        assert!(partial_correlation_of(&d, 0, 2, &VertexSet::new()).unwrap() > 0.4);
    }

    #[test]
    fn set_level_any_pair_rule() {
        // 0 independent of 1, 0 -> 2.
        let d = dataset(20_000, 3, 6, |z| vec![z[0], z[1], z[0] + z[2]]);
        let stats = RegimeStats::from_dataset(&d);
        let cfg = GaussianTesterConfig::default();
        assert!(set_dependent_sampled(&stats, &VertexSet::from([0]), &VertexSet::from([1, 2]), &VertexSet::new(), &cfg).unwrap());
        let r = partial_correlation(&stats.covariance, 0, 1, &VertexSet::new()).unwrap();
        let pair = fisher_z_decision(r, stats.m, 0, cfg.alpha).unwrap().dependent;
        assert_eq!(
            set_dependent_sampled(&stats, &VertexSet::from([0]), &VertexSet::from([1]), &VertexSet::new(), &cfg).unwrap(),
            pair
        );
        assert!(set_dependent_sampled(&stats, &VertexSet::from([0, 1]), &VertexSet::from([1]), &VertexSet::new(), &cfg).is_err());
    }

    #[test]
    fn tester_rejects_short_data() {
        let d = dataset(5, 2, 1, |z| z.to_vec());
        let err = GaussianTester::new(&d, &[], GaussianTesterConfig::default()).unwrap_err();
        assert!(matches!(err, Error::SampleSize { needed: 10, have: 5 }));
    }
}
