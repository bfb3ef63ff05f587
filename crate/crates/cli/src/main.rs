fn main() {
    std::process::exit(sigma_cli::main_with(std::env::args_os()));
}
