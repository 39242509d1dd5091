fn main() {
    std::process::exit(dualpair_cli::main_with(std::env::args()));
}
