use std::collections::BTreeMap;

use super::{CiQuery, CiTest, Regime};
use crate::error::{Error, Result};
use crate::graph::{Dag, Intervention};

/// Faithful oracle: dependence is the negation of d-separation in the true
/// graph, or in its mutilation for an interventional regime.
#[derive(Clone, Debug)]
pub struct DsepTester {
    graph: Dag,
    mutilated: BTreeMap<usize, Dag>,
}

impl DsepTester {
    pub fn new(graph: Dag, interventions: &[Intervention]) -> Result<Self> {
        let mut mutilated = BTreeMap::new();
        for i in interventions {
            if mutilated.insert(i.id, graph.mutilate(i)?).is_some() {
                return Err(Error::Argument(format!("duplicate intervention id {}", i.id)));
            }
        }
        Ok(Self { graph, mutilated })
    }

    pub fn observational(graph: Dag) -> Self {
        Self { graph, mutilated: BTreeMap::new() }
    }

    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    pub fn graph_for(&self, regime: Regime) -> Result<&Dag> {
        match regime {
            Regime::Observational => Ok(&self.graph),
            Regime::Intervention(id) => self.mutilated.get(&id).ok_or(Error::UnknownRegime(regime)),
        }
    }
}

impl CiTest for DsepTester {
    fn n(&self) -> usize {
        self.graph.n()
    }

    fn supports(&self, regime: Regime) -> bool {
        self.graph_for(regime).is_ok()
    }

    fn dependent(&self, query: &CiQuery) -> Result<bool> {
        let g = self.graph_for(query.regime())?;
        Ok(!g.d_separated(query.a(), query.b(), query.cond())?)
    }
}
