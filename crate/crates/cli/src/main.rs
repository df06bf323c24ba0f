use std::io::Write;

use clap::Parser;
use zeta_moments_cli::{execute, Cli, RunConfig};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let config = RunConfig::from_cli(cli);
    let outcome = execute(&config);
    if let Some(msg) = &outcome.message {
        eprintln!("zeta-moments: {msg}");
    }
    if let Some(body) = &outcome.body {
        let written = match &config.out {
            Some(path) => std::fs::write(path, body)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| e.to_string()),
        };
        if let Err(e) = written {
            eprintln!("zeta-moments: {e}");
            std::process::exit(2);
        }
    }
    std::process::exit(outcome.code as i32);
}
