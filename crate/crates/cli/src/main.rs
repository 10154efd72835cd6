fn main() {
    std::process::exit(ccmu_cli::run(std::env::args_os()));
}
