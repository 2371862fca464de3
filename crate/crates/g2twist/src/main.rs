fn main() {
    std::process::exit(g2twist::cli::run());
}
