fn main() {
    std::process::exit(horizon_limit::cli::run(std::env::args_os()));
}
