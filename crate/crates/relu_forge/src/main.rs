fn main() {
    std::process::exit(relu_forge::cli::run(std::env::args_os()));
}
