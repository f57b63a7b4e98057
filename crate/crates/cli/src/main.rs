mod args;
mod error;
mod output;
mod run;

use std::process::ExitCode;

use clap::Parser;
use gmspec::Execution;

use crate::args::Cli;
use crate::error::CliError;

fn configure_threads(threads: Option<usize>) -> Result<Execution, CliError> {
    match threads {
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::input(format!("--threads: {e}")))?;
            Ok(Execution::Parallel)
        }
        _ => Ok(Execution::default()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(cli.command.shared().threads)
        .and_then(|exec| run::execute(&cli.command, exec));
    match result {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gmspec {}: error: {e}", cli.command.name());
            if let Some(d) = &e.detail {
                eprintln!("{d}");
            }
            ExitCode::from(e.kind as u8)
        }
    }
}
