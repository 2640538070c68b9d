fn main() { std::process::exit(ftscp::cli::cli_main(std::env::args())) }
