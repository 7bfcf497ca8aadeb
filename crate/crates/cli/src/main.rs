fn main() {
    std::process::exit(insproute_cli::run(std::env::args_os()));
}
