fn main() {
    std::process::exit(genmr_cli::main_with(std::env::args_os()));
}
