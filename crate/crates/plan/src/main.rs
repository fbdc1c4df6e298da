use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(miab_plan::cli::main_with_args(std::env::args_os()))
}
