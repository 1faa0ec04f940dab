//! Command-line front end: `correlate`, `sweep`, `chsh` and `validate`.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 finished with flagged
//! rows (accuracy warnings or per-point failures), 3 internal error.

pub mod config;
pub mod output;
pub mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub use config::{OutputFormat, RunConfig};
pub use run::{Issue, Quantity, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_WARNINGS: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// One correlation at the base configuration.
    Correlate,
    /// Correlations over the configured sweep axes.
    Sweep,
    /// CHSH combination, swept if axes are configured.
    Chsh,
    /// Check the configuration without integrating.
    Validate,
}

/// Command-line overrides of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub timing: bool,
}

/// A configuration problem rendered with its source line when known.
pub fn render_issue(source: &str, issue: &Issue) -> String {
    match config::locate(source, &issue.path) {
        Some(line) => format!("line {line}: {}: {}", issue.path, issue.message),
        None => format!("{}: {}", issue.path, issue.message),
    }
}

/// Loads, validates and runs; diagnostics go to `err`. Returns the exit code.
pub fn execute(command: Command, config_path: &Path, opts: &Options, err: &mut dyn Write) -> i32 {
    let source = match std::fs::read_to_string(config_path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "cannot read {}: {e}", config_path.display());
            return EXIT_INVALID;
        }
    };
    execute_source(command, &source, opts, err)
}

/// As [`execute`], with the configuration already in memory.
pub fn execute_source(command: Command, source: &str, opts: &Options, err: &mut dyn Write) -> i32 {
    let cfg = match RunConfig::from_toml(source) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "invalid configuration: {e}");
            return EXIT_INVALID;
        }
    };
    let (quantity, sweep) = match command {
        Command::Correlate => (Quantity::Correlation, false),
        Command::Sweep => (Quantity::Correlation, true),
        Command::Chsh => (Quantity::Chsh, !cfg.sweep.is_empty()),
        Command::Validate => (Quantity::Correlation, !cfg.sweep.is_empty()),
    };
    let mut issues = run::validate(&cfg, quantity, sweep);
    if command == Command::Validate && cfg.measurement.a_prime.is_some() != cfg.measurement.b_prime.is_some() {
        issues.push(Issue {
            path: "measurement".into(),
            message: "a_prime and b_prime must be given together".into(),
        });
    }
    if !issues.is_empty() {
        for issue in &issues {
            let _ = writeln!(err, "{}", render_issue(source, issue));
        }
        return EXIT_INVALID;
    }
    if command == Command::Validate {
        let _ = writeln!(err, "configuration is valid");
        return EXIT_OK;
    }

    let seed = opts.seed.or(cfg.seed).unwrap_or(0);
    let timing = opts.timing || cfg.output.timing;
    let rows = {
        let pool = match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.unwrap_or(0)).build() {
            Ok(p) => p,
            Err(e) => {
                let _ = writeln!(err, "cannot start worker pool: {e}");
                return EXIT_INTERNAL;
            }
        };
        match pool.install(|| run::run(&cfg, quantity, sweep, seed, timing)) {
            Ok(rows) => rows,
            Err(e) => {
                let _ = writeln!(err, "{e}");
                return EXIT_INVALID;
            }
        }
    };

    let format = opts.format.unwrap_or(cfg.output.format);
    let path = opts.output.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    let written = match &path {
        Some(p) => File::create(p).and_then(|f| output::write_rows(&rows, format, BufWriter::new(f))),
        None => output::write_rows(&rows, format, io::stdout().lock()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "cannot write output: {e}");
        return EXIT_INTERNAL;
    }

    let flagged: Vec<&Row> = rows.iter().filter(|r| r.flagged()).collect();
    for r in &flagged {
        let _ = writeln!(err, "row {} [{}]: {}", r.index, r.status, r.message);
    }
    if flagged.is_empty() {
        EXIT_OK
    } else {
        EXIT_WARNINGS
    }
}
