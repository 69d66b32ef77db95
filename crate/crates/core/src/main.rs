fn main() {
    std::process::exit(nwidths::cli::run(std::env::args_os()));
}
