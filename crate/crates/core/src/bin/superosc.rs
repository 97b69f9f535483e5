fn main() {
    std::process::exit(superosc::cli::main_exit());
}
