fn main() {
    std::process::exit(platelim::cli::run(std::env::args_os()));
}
