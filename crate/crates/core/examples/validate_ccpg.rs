use ccpg::validate::singleton_ccpg;
use ccpg::{check_ccpg, synth, CcpgOutput, VertexSet};

fn show(label: &str, report: &ccpg::ValidationReport) {
    println!("{label}: passed = {}", report.passed);
    for c in report.failing() {
        println!("  {} fails: {:?}", c.clause, c.witnesses);
    }
}

fn main() {
    let g = synth::chain(3);

    let whole = CcpgOutput {
        components: vec![VertexSet::from([0, 1, 2])],
        edges: vec![],
        layers: vec![0],
        ci_total: 0,
        ci_unique: 0,
        phases: Default::default(),
    };
    show("one component", &check_ccpg(&g, &whole, None).unwrap());
    show("singletons", &check_ccpg(&g, &singleton_ccpg(&g), None).unwrap());

    // Swapping the order of the last two parts breaks the prefix chain.
    let mut swapped = singleton_ccpg(&g);
    swapped.components.swap(1, 2);
    swapped.edges = vec![(0, 2), (1, 2)];
    show("swapped", &check_ccpg(&g, &swapped, None).unwrap());

    // The whole chain is a valid CCPG, until an intervention cuts its covered
    // edges.
    let ints = synth::covered_edge_verifying_set(&g);
    show("one component, intervened", &check_ccpg(&g, &whole, Some(&ints)).unwrap());
}
