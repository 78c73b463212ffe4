fn main() {
    std::process::exit(primlim::cli::run_from_env());
}
