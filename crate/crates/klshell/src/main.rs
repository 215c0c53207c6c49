use clap::Parser;
use klshell::cli::{parse_config, run, Cli};

fn main() {
    let cli = Cli::parse();
    let cfg = match parse_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    match run(&cfg) {
        Ok(0) => {}
        Ok(failures) => {
            eprintln!("{failures} run(s) failed; see summary.json");
            std::process::exit(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
