fn main() {
    std::process::exit(bergman_cli::run(std::env::args_os()));
}
