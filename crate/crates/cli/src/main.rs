fn main() {
    std::process::exit(toa_cli::run());
}
