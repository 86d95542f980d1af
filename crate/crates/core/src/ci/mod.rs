//! Conditional-independence queries.
//!
//! Every query goes through [`CiQuery::new`], which applies the overlap
//! convention (`A ⫫ B | C` means `A ⫫ B | C \ (A ∪ B)`) and orders the two
//! sides so that symmetric queries share one cache entry. [`CiOracle`] wraps
//! any [`CiTest`] backend with that cache and with query counting.

mod exact;
mod gaussian;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

pub use exact::DsepTester;
pub use gaussian::{
    fisher_z_decision, partial_correlation, partial_correlation_of, set_dependent_sampled,
    FisherZOutcome, GaussianTester, GaussianTesterConfig, RegimeStats,
};

/// Which distribution a query is asked about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    Observational,
    /// Regime produced by the intervention with this id.
    Intervention(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CiQuery {
    a: VertexSet,
    b: VertexSet,
    cond: VertexSet,
    regime: Regime,
}

impl CiQuery {
    pub fn new(a: VertexSet, b: VertexSet, cond: &VertexSet, regime: Regime) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Argument("CI query with an empty side".into()));
        }
        if !a.is_disjoint(&b) {
            return Err(Error::Argument(format!("CI query sides overlap: {a:?} vs {b:?}")));
        }
        let cond = cond.difference(&a).difference(&b);
        let (a, b) = if b < a { (b, a) } else { (a, b) };
        Ok(Self { a, b, cond, regime })
    }

    pub fn pair(u: usize, v: usize, cond: &VertexSet, regime: Regime) -> Result<Self> {
        Self::new(VertexSet::singleton(u), VertexSet::singleton(v), cond, regime)
    }

    pub fn a(&self) -> &VertexSet {
        &self.a
    }

    pub fn b(&self) -> &VertexSet {
        &self.b
    }

    /// Conditioning set with `A ∪ B` already removed.
    pub fn cond(&self) -> &VertexSet {
        &self.cond
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiCounter {
    pub total_queries: u64,
    pub unique_queries: u64,
}

impl CiCounter {
    /// Counts accumulated since `earlier`.
    pub fn since(&self, earlier: &CiCounter) -> CiCounter {
        CiCounter {
            total_queries: self.total_queries - earlier.total_queries,
            unique_queries: self.unique_queries - earlier.unique_queries,
        }
    }
}

/// A backend that decides dependence for canonical queries.
pub trait CiTest {
    /// Number of variables.
    fn n(&self) -> usize;

    fn supports(&self, regime: Regime) -> bool;

    /// `true` means dependent.
    fn dependent(&self, query: &CiQuery) -> Result<bool>;
}

/// Caching, counting front end over a [`CiTest`].
pub struct CiOracle<T> {
    tester: T,
    caching: bool,
    answers: HashMap<CiQuery, bool>,
    seen: HashSet<CiQuery>,
    counter: CiCounter,
}

impl<T: CiTest> CiOracle<T> {
    pub fn new(tester: T) -> Self {
        Self {
            tester,
            caching: true,
            answers: HashMap::new(),
            seen: HashSet::new(),
            counter: CiCounter::default(),
        }
    }

    /// Turns the answer cache off; counters still distinguish unique queries.
    pub fn without_cache(mut self) -> Self {
        self.caching = false;
        self
    }

    pub fn n(&self) -> usize {
        self.tester.n()
    }

    pub fn tester(&self) -> &T {
        &self.tester
    }

    pub fn counter(&self) -> CiCounter {
        self.counter
    }

    pub fn supports(&self, regime: Regime) -> bool {
        self.tester.supports(regime)
    }

    pub fn query(&mut self, query: CiQuery) -> Result<bool> {
        if !self.tester.supports(query.regime) {
            return Err(Error::UnknownRegime(query.regime));
        }
        if let Some(bound) = query.a.bound().max(query.b.bound()).max(query.cond.bound()).checked_sub(1) {
            if bound >= self.tester.n() {
                return Err(Error::VertexOutOfRange { vertex: bound, n: self.tester.n() });
            }
        }
        self.counter.total_queries += 1;
        if let Some(&answer) = self.answers.get(&query) {
            return Ok(answer);
        }
        let answer = self.tester.dependent(&query)?;
        if self.caching {
            self.answers.insert(query, answer);
            self.counter.unique_queries += 1;
        } else if self.seen.insert(query) {
            self.counter.unique_queries += 1;
        }
        Ok(answer)
    }

    pub fn dependent(
        &mut self,
        a: &VertexSet,
        b: &VertexSet,
        cond: &VertexSet,
        regime: Regime,
    ) -> Result<bool> {
        self.query(CiQuery::new(a.clone(), b.clone(), cond, regime)?)
    }

    /// Observational `u ⊥̸ v | cond`.
    pub fn dep(&mut self, u: usize, v: usize, cond: &VertexSet) -> Result<bool> {
        self.query(CiQuery::pair(u, v, cond, Regime::Observational)?)
    }

    /// Observational `u ⫫ v | cond`.
    pub fn indep(&mut self, u: usize, v: usize, cond: &VertexSet) -> Result<bool> {
        Ok(!self.dep(u, v, cond)?)
    }

    pub fn dep_in(&mut self, u: usize, v: usize, cond: &VertexSet, regime: Regime) -> Result<bool> {
        self.query(CiQuery::pair(u, v, cond, regime)?)
    }
}
