fn main() {
    std::process::exit(tileupb_cli::main_with_args(std::env::args_os()));
}
