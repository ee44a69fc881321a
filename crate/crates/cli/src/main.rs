fn main() {
    std::process::exit(gcurkit_cli::run(std::env::args_os()));
}
