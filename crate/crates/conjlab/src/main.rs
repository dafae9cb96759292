use clap::Parser;
use conjlab::cli::{run, Cli};

fn main() {
    let status = run(Cli::parse());
    std::process::exit(status as i32);
}
