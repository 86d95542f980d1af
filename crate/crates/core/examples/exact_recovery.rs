//! Learn an in-star graph from an exact d-separation oracle and compare the
//! result with the ground truth.

use ccpg::{build, synth, CiOracle, DsepTester};

fn main() {
    let g = synth::in_star(6);
    let mut oracle = CiOracle::new(DsepTester::observational(g.clone()));
    let out = build(&mut oracle).expect("exact oracle never stalls");

    println!("components: {:?}", out.components);
    println!("edges:      {:?}", out.edges);
    println!("CI queries: {} issued, {} unique", out.ci_total, out.ci_unique);
    assert!(out.equals_dag(&g));
    println!("recovered the in-star exactly");
}
