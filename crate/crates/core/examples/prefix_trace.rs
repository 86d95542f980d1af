//! Step through the prefix chain one layer at a time and print the
//! exclusion sets behind each step.

use ccpg::{learn_prefix, CiOracle, Dag, DsepTester, VertexSet};

fn main() {
    // Two sources feeding a chain: 0 -> 2 <- 1, 2 -> 3 -> 4, 1 -> 4.
    let g = Dag::new(5, [(0, 2), (1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
    let mut oracle = CiOracle::new(DsepTester::observational(g.clone()));

    let mut s = VertexSet::new();
    let mut k = 1;
    while s.len() < g.n() {
        let step = learn_prefix(&mut oracle, &s).unwrap();
        println!("step {k}: S = {:?}", step.input_prefix);
        println!("  D = {:?}  E = {:?}  F = {:?}", step.d_set, step.e_set, step.f_set);
        println!("  S' = {:?} ({} unique queries)", step.output_prefix, step.queries_used.unique_queries);
        assert!(g.is_prefix_set(&step.output_prefix).unwrap());
        s = step.output_prefix;
        k += 1;
    }
}
