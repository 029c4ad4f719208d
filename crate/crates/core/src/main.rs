use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use proxcor::cli::{run, Cli};

fn configure_threads() {
    let Ok(raw) = std::env::var("PROXCOR_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            // only fails if a global pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => eprintln!("warning: ignoring PROXCOR_THREADS={raw:?} (expected a non-negative integer)"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    match run(cli, &mut out, &mut err) {
        Ok(()) => {
            let _ = out.flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(err, "error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
