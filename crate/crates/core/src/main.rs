fn main() {
    std::process::exit(spinbath::cli::main_with_args(std::env::args_os()));
}
