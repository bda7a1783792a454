fn main() {
    std::process::exit(tsmeta::cli::run());
}
