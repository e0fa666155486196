use std::io::Write;

fn main() {
    let out = crs_toolkit::cli::run_command(std::env::args_os().skip(1));
    // A closed pipe (e.g. `| head`) is not worth a panic.
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.status);
}
