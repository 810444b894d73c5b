fn main() {
    std::process::exit(paramp_lab::cli::run());
}
