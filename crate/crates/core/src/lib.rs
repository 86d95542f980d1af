//! Learning causally consistent partition graphs (CCPGs) of a hidden DAG.
//!
//! A CCPG is an ordered partition `V_1, …, V_k` of the vertices together with
//! a DAG over the parts that agrees with the true causal graph: every part
//! has a single source, and multi-vertex parts hang together by a covered
//! edge. The learner here needs only polynomially many conditional
//! independence (CI) queries, answered either by an exact d-separation
//! oracle or by a Fisher-z test on Gaussian samples. With interventional
//! regimes it learns the refined I-CCPG, which is the DAG itself whenever
//! the interventions cut every covered edge.
//!
//! ```
//! use ccpg::{build, synth, CiOracle, DsepTester};
//!
//! let g = synth::in_star(5);
//! let mut oracle = CiOracle::new(DsepTester::observational(g.clone()));
//! let out = build(&mut oracle).unwrap();
//! assert!(out.equals_dag(&g));
//! ```

pub mod builder;
pub mod ci;
pub mod cli;
pub mod data;
pub mod error;
pub mod graph;
pub mod prefix;
pub mod synth;
pub mod validate;
pub mod vertex_set;

pub use builder::{build, build_int, build_traced, BuildResult, CcpgJson, CcpgOutput};
pub use ci::{CiCounter, CiOracle, CiQuery, CiTest, DsepTester, GaussianTester, GaussianTesterConfig, Regime};
pub use data::{Dataset, RegimeManifest};
pub use error::{Error, Result};
pub use graph::{Dag, Intervention};
pub use prefix::{learn_prefix, learn_prefix_int, PrefixStepTrace};
pub use validate::{check_ccpg, is_verifying_set, ValidationReport};
pub use vertex_set::VertexSet;
