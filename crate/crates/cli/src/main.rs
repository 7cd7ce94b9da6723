use clap::Parser;
use qho_cli::{run, Cli};

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("qho: {e}");
        std::process::exit(e.exit_code());
    }
}
