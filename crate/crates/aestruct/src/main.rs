fn main() {
    std::process::exit(aestruct::cli::run_from_env());
}
