fn main() {
    std::process::exit(lifespan::cli::run());
}
