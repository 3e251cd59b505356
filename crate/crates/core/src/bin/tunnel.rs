fn main() {
    std::process::exit(tunnel_core::cli::run(std::env::args_os()));
}
