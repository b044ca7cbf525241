use clap::Parser;
use qcross::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
