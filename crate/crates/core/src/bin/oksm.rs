fn main() {
    std::process::exit(oksm::cli::run(std::env::args_os()));
}
