//! Command-line front end: configuration, report formats, command dispatch
//! and the acceptance battery.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;

use std::ffi::OsString;

use clap::Parser;

use config::{parse_config, Args, CliError, CliResult};

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("JTCALC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("JTCALC_THREADS must be a positive integer, got `{v}`")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(args: Args) -> CliResult<()> {
    init_threads()?;
    let file = match &args.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let cfg = parse_config(args, file.as_deref())?;
    let rep = commands::dispatch(&cfg)?;
    let out = rep.render(cfg.format)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{out}"),
    }
    match rep.violation {
        Some(v) => Err(CliError::Violation(v)),
        None => Ok(()),
    }
}

/// Runs the tool on `argv` (program name first) and returns the exit status:
/// 0 on success, 1 on a property violation, 2 on a usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("jtcalc: {e}");
            match e {
                CliError::Violation(_) => 1,
                CliError::Usage(_) => 2,
            }
        }
    }
}
