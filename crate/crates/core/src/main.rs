fn main() {
    std::process::exit(toric_vanishing::cli::run());
}
