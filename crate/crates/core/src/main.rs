use clap::Parser;
use fracrd::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("fracrd: {e}");
        std::process::exit(e.exit_code());
    }
}
