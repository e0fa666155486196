//! The width families that maximize D_CS and D_ACS at fixed D_KL.
//!
//! cargo run --release --example optimal_families

use crs_toolkit::*;

fn main() -> Result<()> {
    println!("{:>6} {:>10} {:>10} {:>10}", "alpha", "D_KL", "D_CS", "quad D_CS");
    for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let v = optimal_family_values(OptimalFamily::Cs { alpha })?;
        let quad = quad_phi_integral(&v.width, &Phi::Cs, 1e-9)?.value_bits;
        println!("{alpha:>6} {:>10.6} {:>10.6} {quad:>10.6}", v.kl_bits, v.divergence_bits);
    }
    println!("\n{:>6} {:>10} {:>10} {:>10}", "alpha", "D_KL", "D_ACS", "quad D_ACS");
    for alpha in [1.5, 2.0, 3.0, 5.0, 10.0] {
        let v = optimal_family_values(OptimalFamily::Acs { alpha })?;
        let quad = quad_phi_integral(&v.width, &Phi::Acs, 1e-9)?.value_bits;
        println!("{alpha:>6} {:>10.6} {:>10.6} {quad:>10.6}", v.kl_bits, v.divergence_bits);
    }
    Ok(())
}
