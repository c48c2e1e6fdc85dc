fn main() {
    std::process::exit(qlbounds::cli::main_entry());
}
