//! A chain is one component without interventions; cutting its covered
//! edges with single-vertex interventions splits it into singletons.

use ccpg::{build, build_int, synth, CiOracle, DsepTester};

fn main() {
    let g = synth::chain(4);

    let mut plain = CiOracle::new(DsepTester::observational(g.clone()));
    let obs = build(&mut plain).unwrap();
    println!("observational: {:?}", obs.components);

    let ints = synth::covered_edge_verifying_set(&g);
    for i in &ints {
        println!("intervention {} on {:?}", i.id, i.targets);
    }
    let mut oracle = CiOracle::new(DsepTester::new(g.clone(), &ints).unwrap());
    let out = build_int(&mut oracle, &ints).unwrap();
    println!("with interventions: {:?} edges {:?}", out.components, out.edges);
    assert!(out.equals_dag(&g));

    let log2 = synth::log2_intervention_set(g.n());
    let mut oracle = CiOracle::new(DsepTester::new(g.clone(), &log2).unwrap());
    let out = build_int(&mut oracle, &log2).unwrap();
    println!("{} bit-pattern interventions also recover it: {}", log2.len(), out.equals_dag(&g));
}
