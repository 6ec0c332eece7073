fn main() {
    std::process::exit(rigidity::cli::run(std::env::args_os()));
}
