use std::process::ExitCode;

fn main() -> ExitCode {
    golomb_trees::cli::run()
}
