fn main() {
    std::process::exit(qcperiod::cli::main_entry());
}
