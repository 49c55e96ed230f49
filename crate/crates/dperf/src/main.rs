use clap::Parser;
use dperf::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("dperf: {e}");
        std::process::exit(e.exit_code());
    }
}
