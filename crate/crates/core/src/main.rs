use std::process::ExitCode;

fn main() -> ExitCode {
    aucgap::cli::run_from(std::env::args_os())
}
