use clap::Parser;

fn main() -> std::process::ExitCode {
    shockcell::cli::run(shockcell::cli::Cli::parse())
}
