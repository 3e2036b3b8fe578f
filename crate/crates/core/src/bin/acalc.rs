fn main() {
    std::process::exit(acalc::cli::run(std::env::args_os()));
}
