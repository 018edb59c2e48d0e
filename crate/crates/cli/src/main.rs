fn main() {
    std::process::exit(apery_cli::run(std::env::args_os()));
}
