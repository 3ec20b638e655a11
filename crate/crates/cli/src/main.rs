fn main() {
    std::process::exit(qcloning_cli::run(std::env::args_os()));
}
