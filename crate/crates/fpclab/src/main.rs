fn main() {
    std::process::exit(fpclab::cli::main());
}
