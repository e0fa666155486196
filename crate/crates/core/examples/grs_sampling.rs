//! Running the sampler: single draws and a parallel empirical study.
//!
//! cargo run --release --example grs_sampling

use crs_toolkit::*;

fn main() -> Result<()> {
    let spec = PairSpec::laplace(0.5);
    let pair = make_pair(&spec)?;
    let w = width_eval(&spec)?;
    let mut rng = stream(42, 0);
    for _ in 0..5 {
        let draw = grs_sample(&pair, &w, &mut rng)?;
        println!("k = {:>2}, x = {:?}", draw.k, draw.x);
    }

    // Run i uses stream(seed, i), so results do not depend on thread count.
    let runs = 50_000;
    let emp = grs_empirical(&pair, &w, 7, runs)?;
    let exact = grs_index_distribution(&w, 1e-9)?;
    let mean = emp.histogram.iter().enumerate().map(|(i, c)| (i + 1) as f64 * *c as f64).sum::<f64>() / runs as f64;
    println!("empirical E[K] = {mean:.4}, exact {:.4}", exact.mean());
    for (k, s) in emp.survival().iter().take(5).enumerate() {
        println!("P[K ≥ {}] = {s:.4}", k + 1);
    }
    Ok(())
}
