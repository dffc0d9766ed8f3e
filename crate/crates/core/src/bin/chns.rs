fn main() {
    std::process::exit(chns::cli::main_with_args(std::env::args_os()));
}
