fn main() {
    std::process::exit(factor_pricing::cli::run(std::env::args_os()));
}
