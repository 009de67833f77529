fn main() {
    std::process::exit(rla::cli::main());
}
