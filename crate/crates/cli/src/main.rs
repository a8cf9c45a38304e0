use std::process::ExitCode;

use clap::Parser;

use hamswitch_cli::{run, Cli};
use hamswitch_core::Error;

fn main() -> ExitCode {
    // HAMSWITCH_THREADS caps the worker pool; default is every core.
    if let Ok(v) = std::env::var("HAMSWITCH_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CapExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
