//! Driving the command line from code; the `crs-toolkit` binary is a thin
//! wrapper over `run_command`.
//!
//! cargo run --release --example cli

use crs_toolkit::cli::run_command;

fn main() {
    for args in [
        "divergence --family laplace --b 0.5 --kind cs",
        "grs entropy --family discrete --q 0.5,0.5,0,0 --p 0.25,0.25,0.25,0.25",
        "grs sample --family gaussian --mu 1 --sigma 0.5 --d 2 --seed 3",
        "experiment epsilon --grid 0.3,0.1",
    ] {
        let out = run_command(args.split_whitespace());
        print!("$ crs-toolkit {args}\n{}{}", out.stdout, out.stderr);
    }
}
