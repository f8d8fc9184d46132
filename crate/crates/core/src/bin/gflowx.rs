fn main() {
    std::process::exit(gflowx::cli::main_with_args(std::env::args_os()));
}
