use std::io::IsTerminal;
use std::process::ExitCode;

use bfree::cli::{error_json, execute, exit_code, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("{}", error_json("usage", e.kind().to_string().as_str(), 2));
            return ExitCode::from(2);
        }
    };
    let config = cli.into_config(std::io::stdout().is_terminal());
    if let Some(threads) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("{}", error_json("threads", &e.to_string(), 1));
            return ExitCode::from(1);
        }
    }
    match execute(&config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("{}", error_json(e.code(), &e.to_string(), code));
            ExitCode::from(code as u8)
        }
    }
}
