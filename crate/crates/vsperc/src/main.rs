use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(vsperc::cli::run(std::env::args_os()))
}
