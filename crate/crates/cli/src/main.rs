use std::process::ExitCode;

fn main() -> ExitCode {
    ptlab::run(std::env::args_os())
}
