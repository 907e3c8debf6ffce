fn main() {
    std::process::exit(fenc::cli::main_with_args(std::env::args_os()));
}
