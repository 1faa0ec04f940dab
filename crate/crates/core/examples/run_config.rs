//! Runs a TOML configuration through the command-line layer and prints the
//! CSV rows. Pass a path to use another configuration.

use std::path::PathBuf;

use localized_epr::cli::{execute, Command, Options};

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/momentum_scale_sweep.toml")
    });
    let code = execute(Command::Validate, &path, &Options::default(), &mut std::io::stderr());
    if code != 0 {
        std::process::exit(code);
    }
    let code = execute(Command::Sweep, &path, &Options::default(), &mut std::io::stderr());
    std::process::exit(code);
}
