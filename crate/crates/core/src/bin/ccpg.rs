fn main() {
    std::process::exit(ccpg::cli::main_with_args(std::env::args_os()));
}
