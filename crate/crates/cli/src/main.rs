use clap::Parser;

use jtd_sim::args::Cli;

fn main() {
    let cli = Cli::parse();
    match jtd_sim::run(cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", outcome.summary);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
