//! D_CS computed directly and through its representation in terms of w⁻¹.
//!
//! cargo run --release --example integral_representation

use crs_toolkit::*;

fn main() -> Result<()> {
    for (name, w) in [
        ("laplace b = 0.25", WidthFunction::laplace(0.25)?),
        ("laplace b = 0.5", WidthFunction::laplace(0.5)?),
        ("rectangle c = 4", WidthFunction::rectangle(4.0)?),
        ("epsilon 0.1", WidthFunction::epsilon_family(0.1)?),
    ] {
        let (direct, represented) = dcs_integral_representation_check(&w, 1e-9)?;
        println!("{name:<18} {direct:.9} {represented:.9}  diff {:.1e}", (direct - represented).abs());
    }
    Ok(())
}
