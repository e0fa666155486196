//! Every codelength and runtime inequality on the default suite of pairs.
//!
//! cargo run --release --example bound_suite

use crs_toolkit::experiments::{bound_suite, default_suite};

fn main() {
    let report = bound_suite(&default_suite());
    for pair in &report.pairs {
        let worst = pair
            .inequalities
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .map(|i| format!("{} (margin {:.2e})", i.name, i.margin))
            .unwrap_or_else(|| format!("{:?}", pair.error));
        println!("{} {:?}: tightest {worst}", if pair.passed() { "ok  " } else { "FAIL" }, pair.spec);
    }
    println!("all passed: {}", report.passed());
}
