use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = optomech_cli::app::Args::parse();
    std::process::exit(optomech_cli::app::main_with(args));
}
