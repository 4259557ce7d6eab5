use std::process::ExitCode;

fn main() -> ExitCode {
    tracesample::cli::main_with_args(std::env::args_os())
}
