// Unique CI-query counts on random graphs, plus the fitted log-log slope.

use ccpg::{build, synth, CiOracle, DsepTester};

fn main() {
    let sizes = [5usize, 10, 20, 40];
    let mut points = Vec::new();
    println!("{:>4} {:>10} {:>10}", "n", "unique", "5n^5");
    for &n in &sizes {
        let mut total = 0u64;
        for seed in 0..3 {
            let g = synth::random_dag(n, 0.3, seed).unwrap();
            let mut oracle = CiOracle::new(DsepTester::observational(g));
            total += build(&mut oracle).unwrap().ci_unique;
        }
        let mean = total as f64 / 3.0;
        println!("{n:>4} {mean:>10.0} {:>10.0}", 5.0 * (n as f64).powi(5));
        points.push(((n as f64).ln(), mean.ln()));
    }
    let k = points.len() as f64;
    let (mx, my) = (points.iter().map(|p| p.0).sum::<f64>() / k, points.iter().map(|p| p.1).sum::<f64>() / k);
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    println!("log-log slope: {slope:.2}");
}
