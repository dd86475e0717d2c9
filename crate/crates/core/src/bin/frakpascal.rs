fn main() {
    std::process::exit(frakpascal::cli::run(std::env::args_os()));
}
