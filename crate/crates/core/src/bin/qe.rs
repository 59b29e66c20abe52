fn main() {
    std::process::exit(quasi_einstein::cli::run(std::env::args_os()));
}
