fn main() {
    std::process::exit(anderson2p::cli::main_with_args(std::env::args_os()));
}
