fn main() {
    std::process::exit(paritysep::cli::main());
}
