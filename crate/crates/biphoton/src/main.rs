fn main() {
    std::process::exit(biphoton::cli::run());
}
