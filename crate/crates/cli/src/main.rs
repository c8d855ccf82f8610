fn main() {
    std::process::exit(topcap_cli::run(std::env::args_os()));
}
