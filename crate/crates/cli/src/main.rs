fn main() {
    std::process::exit(probelink_cli::main_with(std::env::args_os()));
}
