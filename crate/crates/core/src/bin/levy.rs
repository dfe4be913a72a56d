fn main() {
    std::process::exit(levy_samplers::cli::run(std::env::args_os()));
}
