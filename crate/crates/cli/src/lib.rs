//! Library side of the `siegel` binary, so integration tests can drive the
//! commands in process as well as through the executable.

pub mod args;
pub mod commands;
pub mod files;
pub mod report;

use clap::Parser;

use args::{Cli, Format};
use report::EXIT_USAGE;

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(w) = cli.global.workers {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global();
    }
    let outcome = match commands::dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Some(path) = &cli.global.out {
        if let Err(e) = files::save_json(path, &outcome.report) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    match cli.global.format {
        Format::Json => print!("{}", outcome.report.to_json()),
        Format::Text => {
            for line in &outcome.text {
                println!("{line}");
            }
            println!("status: {}", commands::status_word(outcome.report.status));
        }
    }
    outcome.report.exit_code()
}
