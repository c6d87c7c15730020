fn main() {
    std::process::exit(forchheimer::cli::main_with_args(std::env::args_os()));
}
