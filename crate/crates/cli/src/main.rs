fn main() {
    std::process::exit(silt_cli::run(std::env::args_os()));
}
