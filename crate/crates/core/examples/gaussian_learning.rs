//! Sample a linear-Gaussian SEM on a 10-node in-star and learn it with the
//! Fisher-z tester.

use ccpg::{build, synth, CiOracle, GaussianTester, GaussianTesterConfig};

fn main() {
    let g = synth::in_star(10);
    let (lo, hi) = synth::DEFAULT_WEIGHT_RANGE;
    let model = synth::random_sem(&g, lo, hi, 7).unwrap();
    let data = synth::sample(&model, 100_000, 8).unwrap();

    let cfg = GaussianTesterConfig { alpha: 0.01, ..Default::default() };
    let mut oracle = CiOracle::new(GaussianTester::new(&data, &[], cfg).unwrap());
    match build(&mut oracle) {
        Ok(out) => {
            println!("{} components, {} edges", out.components.len(), out.edges.len());
            println!("exact recovery: {}", out.equals_dag(&g));
        }
        Err(e) => println!("learning stopped: {e}"),
    }
}
