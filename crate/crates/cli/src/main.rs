fn main() {
    std::process::exit(pfo2d_cli::main_with_args(std::env::args_os()));
}
