//! H[K] − D_CS approaches log2(e + 1) along the ε family.
//!
//! cargo run --release --example epsilon_tightness

use crs_toolkit::divergences::log2_e_plus_1;
use crs_toolkit::experiments::{default_epsilon_grid, epsilon_family_study};

fn main() -> crs_toolkit::Result<()> {
    let limit = log2_e_plus_1();
    for r in epsilon_family_study(&default_epsilon_grid(), 1e-12)? {
        println!("ε = {:<6} D_CS = {:.6}  H[K] = {:.6}  gap = {:.6} ({:.2}% of log2(e+1))",
            r.eps, r.dcs_bits, r.entropy_bits, r.gap_bits, 100.0 * r.gap_bits / limit);
    }
    Ok(())
}
