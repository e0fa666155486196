//! D_KL, D_CS and D_ACS across families, plus a custom φ.
//!
//! cargo run --release --example divergences

use crs_toolkit::*;

fn main() -> Result<()> {
    let specs = [
        PairSpec::laplace(0.1),
        PairSpec::gaussian(1.0, 0.5, 1),
        PairSpec::discrete(&[0.1, 0.2, 0.7], &[0.3, 0.3, 0.4]),
        PairSpec::synthetic(SyntheticWidth::Rectangle { c: 8.0 }),
    ];
    println!("{:<48} {:>10} {:>10} {:>10}", "pair", "D_KL", "D_CS", "D_ACS");
    for spec in &specs {
        let v = |kind| divergence(spec, kind, None).map(|r| r.value_bits);
        println!(
            "{:<48} {:>10.6} {:>10.6} {:>10.6}",
            format!("{spec:?}"),
            v(DivergenceKind::KL)?,
            v(DivergenceKind::CS)?,
            v(DivergenceKind::ACS)?
        );
    }

    let report = divergence(&PairSpec::laplace(0.1), DivergenceKind::CS, None)?;
    println!("\nLaplace b = 0.1 D_CS via {:?}: {:.9}", report.method, report.value_bits);
    let closed = dcs_laplace_closed(0.1)?;
    println!("digamma closed form:            {closed:.9}");

    let kl = kl_divergence(&PairSpec::laplace(0.1), KlRoute::WidthIdentity)?.value_bits;
    let s = kl_sandwich(kl)?;
    println!("KL sandwich: {:.4} ≤ D_CS ≤ {:.4}, H[K] < {:.4}", s.cs_lower_bits, s.cs_upper_bits, s.entropy_upper_bits);

    // Any concave φ with φ(0) = φ(1) = 0 works; here φ(x) = x(1 − x).
    let phi = Phi::custom(|x| x * (1.0 - x));
    let w = WidthFunction::laplace(0.1)?;
    println!("D^φ with φ(x) = x(1 − x): {:.6}", quad_phi_integral(&w, &phi, 1e-9)?.value_bits);
    Ok(())
}
