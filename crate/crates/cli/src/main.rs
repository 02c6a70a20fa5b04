use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = hdk_cli::Cli::parse();
    match hdk_cli::init_threads().and_then(|()| hdk_cli::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("hdk: {err:#}");
            hdk_cli::exit_code(&err)
        }
    }
}
