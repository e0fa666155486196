//! Δ = D_CS − D_KL over Laplace scales, bracketed by the digamma bounds.
//!
//! cargo run --release --example laplace_sweep

use crs_toolkit::experiments::{default_laplace_grid, laplace_sweep, write_rows};

fn main() -> crs_toolkit::Result<()> {
    let grid: Vec<f64> = default_laplace_grid().into_iter().step_by(4).collect();
    let rows = laplace_sweep(&grid, 1e-8)?;
    for r in &rows {
        println!(
            "b = {:.4}: Δ = {:.6} bits, Δ ln 2 ∈ [{:.6}, {:.6}], H[K] = {:.6}",
            r.b,
            r.delta_bits,
            r.lower_digamma_nats,
            r.upper_digamma_nats,
            r.entropy_bits
        );
    }
    write_rows(&rows, std::io::stdout())
}
