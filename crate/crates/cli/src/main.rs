use clap::Parser;
use ledgergraph_cli::{execute, Cli};
use std::io::Write;

fn main() {
    let cli = Cli::parse();
    match execute(&cli, |k| std::env::var(k).ok()) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serialises");
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout(), "{text}");
        }
        Err(e) => {
            eprintln!("{}", e.report());
            std::process::exit(e.exit_code());
        }
    }
}
