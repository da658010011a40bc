use std::process::ExitCode;

fn main() -> ExitCode {
    spikebench::cli::main_entry()
}
