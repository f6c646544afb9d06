fn main() {
    std::process::exit(rsep_core::cli::run(std::env::args_os()));
}
