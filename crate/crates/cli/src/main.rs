fn main() {
    std::process::exit(chrsolve_cli::cli::main_entry());
}
