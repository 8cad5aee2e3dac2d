fn main() {
    std::process::exit(covert_harness::cli::run(std::env::args_os()));
}
