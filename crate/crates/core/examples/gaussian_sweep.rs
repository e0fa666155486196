//! Δ over Gaussian dimension against ½·log2(D_KL + 1).
//!
//! cargo run --release --example gaussian_sweep

use crs_toolkit::experiments::{default_gaussian_grid, gaussian_sweep};

fn main() -> crs_toolkit::Result<()> {
    for r in gaussian_sweep(&default_gaussian_grid(), 1.0, 0.5)? {
        println!(
            "d = {:>2}: D_KL = {:>8.4}, Δ = {:.4}, ½log2(D_KL+1) = {:.4}, residual {:+.4}",
            r.d,
            r.kl_bits,
            r.delta_bits,
            r.conjecture_half_log_bits,
            r.residual_bits()
        );
    }
    Ok(())
}
