fn main() {
    std::process::exit(gaussym_cli::run_cli(std::env::args_os()));
}
