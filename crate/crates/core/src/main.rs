use clap::Parser;
use npdual::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NPDUAL_LOG", "warn"))
        .format_timestamp(None)
        .init();
    std::process::exit(run(&Cli::parse()));
}
