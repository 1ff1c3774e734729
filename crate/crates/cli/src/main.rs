fn main() {
    std::process::exit(gsek_cli::run(std::env::args_os()));
}
