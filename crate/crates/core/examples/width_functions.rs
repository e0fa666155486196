//! Width functions of each pair family, checked against Monte Carlo.
//!
//! cargo run --release --example width_functions

use crs_toolkit::width::write_width_table;
use crs_toolkit::*;

fn main() -> Result<()> {
    let specs = [
        PairSpec::laplace(0.5),
        PairSpec::gaussian(1.0, 0.5, 2),
        PairSpec::discrete(&[0.5, 0.5, 0.0, 0.0], &[0.25; 4]),
        PairSpec::synthetic(SyntheticWidth::Epsilon { eps: 0.1 }),
    ];
    let mut rng = stream(1, 0);
    for spec in &specs {
        let w = width_eval(spec)?;
        let pair = make_pair(spec)?;
        println!("{spec:?}");
        println!("  h_max = {:.6}, D_inf = {:.6} bits, mass = {:.9}", w.h_max(), d_infinity(&w), w.total_mass());
        for frac in [0.1, 0.5, 0.9] {
            let h = frac * w.h_max();
            let (est, se) = width_mc_estimate(&pair, h, 20_000, &mut rng)?;
            let (p_mass, q_mass) = superlevel_measures(&w, h)?;
            println!("  w({h:.4}) = {:.5}  MC {est:.5} ± {se:.5}  Q-mass {q_mass:.5}", p_mass);
        }
    }

    // Tabulate a width so it can be fed back through `--width-table`.
    let mut table = Vec::new();
    write_width_table(&WidthFunction::laplace(0.5)?, &mut table)?;
    let text = String::from_utf8(table).expect("csv is utf-8");
    println!("table head:\n{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}
