fn main() {
    std::process::exit(rlwe_core::cli::run(std::env::args_os()));
}
