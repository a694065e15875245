fn main() {
    std::process::exit(siegel_cli::run(std::env::args_os()));
}
