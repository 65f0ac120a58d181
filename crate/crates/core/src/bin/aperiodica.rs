fn main() {
    std::process::exit(aperiodica_core::cli::run(std::env::args_os()));
}
