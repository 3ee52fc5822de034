fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BETAMIX_LOG", "warn")).init();
    std::process::exit(betamix_cli::run(std::env::args_os()));
}
