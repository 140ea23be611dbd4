fn main() {
    std::process::exit(zxcheck::cli::run());
}
