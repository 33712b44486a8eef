use std::net::SocketAddr;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use teachlab_cli::commands::{self, Cli, CliError, Command};
use teachlab_cli::service::{self, AppState};

fn serve(host: &str, port: u16, seed: u64, persist: Option<std::path::PathBuf>) -> Result<(), CliError> {
    let addr: SocketAddr = format!("{host}:{port}").parse().map_err(|e| CliError::Usage(format!("bad address: {e}")))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Other(e.to_string()))?;
    runtime
        .block_on(service::serve(addr, Arc::new(AppState::new(seed, persist))))
        .map_err(|e| CliError::Other(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Serve { port, host, persist, seed } => serve(host, *port, *seed, persist.clone()).map(|_| String::new()),
        other => commands::run(other),
    };
    match result {
        Ok(out) => {
            if !out.is_empty() {
                println!("{out}");
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Failed(text)) => {
            println!("{text}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
