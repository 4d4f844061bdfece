fn main() {
    std::process::exit(elbp::cli::run(std::env::args_os()));
}
