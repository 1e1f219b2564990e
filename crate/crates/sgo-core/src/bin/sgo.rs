fn main() {
    std::process::exit(sgo_core::cli::run(std::env::args_os()));
}
