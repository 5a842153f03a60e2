fn main() {
    std::process::exit(transit_robust::cli::run(std::env::args_os()));
}
