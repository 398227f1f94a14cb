use std::process::ExitCode;

use clap::Parser;
use hyperwave::Cli;

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HYPERWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("HYPERWAVE_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("hyperwave: usage error: {msg}");
        return ExitCode::from(2);
    }
    match hyperwave::run(&cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hyperwave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
