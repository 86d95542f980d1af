use ccpg::{CiOracle, Dag, DsepTester, VertexSet};

fn main() {
    // 0 -> 2 <- 1, 2 -> 3
    let g = Dag::new(4, [(0, 2), (1, 2), (2, 3)]).unwrap();
    let none = VertexSet::new();
    let cases = [
        (0, 1, none.clone()),
        (0, 1, VertexSet::singleton(2)),
        (0, 1, VertexSet::singleton(3)),
        (0, 3, VertexSet::singleton(2)),
        (0, 3, none),
    ];
    let mut oracle = CiOracle::new(DsepTester::observational(g.clone()));
    for (x, y, z) in &cases {
        let sep = g.d_separated(&VertexSet::singleton(*x), &VertexSet::singleton(*y), z).unwrap();
        assert_eq!(sep, oracle.indep(*x, *y, z).unwrap());
        println!("{x} _||_ {y} | {z:?}: {sep}");
    }

    // Conditioning sets overlapping the queried pair are trimmed first.
    let full: VertexSet = [0, 1, 2].into();
    println!("0 _||_ 1 | {full:?}: {}", oracle.indep(0, 1, &full).unwrap());
    let c = oracle.counter();
    println!("{} queries, {} unique", c.total_queries, c.unique_queries);
}
