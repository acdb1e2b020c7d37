fn main() {
    std::process::exit(guf::cli::main());
}
