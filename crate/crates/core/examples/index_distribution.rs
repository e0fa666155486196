//! The exact law of the greedy rejection sampling index K.
//!
//! cargo run --release --example index_distribution

use crs_toolkit::*;

fn main() -> Result<()> {
    let spec = PairSpec::discrete(&[0.5, 0.5, 0.0, 0.0], &[0.25; 4]);
    let w = width_eval(&spec)?;
    let dist = grs_index_distribution(&w, 1e-12)?;
    println!("discrete example: P(K = k) for k ≤ 6: {:?}", &dist.p[..6]);
    println!("  H[K] = {:.9}, E[K] = {:.9}", dist.entropy_bits, dist.mean());

    let traj = GrsTrajectory::new(WidthFunction::laplace(0.5)?);
    for k in 1..=4 {
        let GrsState { lower, survival, .. } = traj.state(k)?;
        println!("laplace 0.5 step {k}: L = {lower:.6}, S = {survival:.6}, β = {:.6}", traj.acceptance(k)?);
    }
    let dist = experiments::default_eps_stop(&PairSpec::laplace(0.5));
    let index = grs::index_distribution_of(&traj, dist)?;
    let (lo, hi) = index.entropy_interval();
    println!("  H[K] ∈ [{lo:.9}, {hi:.9}] after {} terms", index.p.len());
    println!("  E[K] = {:.9} (2^D_inf = {:.1})", index.mean(), traj.width().h_max());
    Ok(())
}
