fn main() {
    std::process::exit(casimir_pulse::cli::run(std::env::args_os()));
}
