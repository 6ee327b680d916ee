use clap::Parser;
use neuropde_cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("NEUROPDE_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("neuropde: {e}");
        std::process::exit(e.exit_code());
    }
}
