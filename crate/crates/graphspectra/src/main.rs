fn main() {
    std::process::exit(graphspectra::cli::run(std::env::args_os()));
}
