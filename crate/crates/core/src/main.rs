fn main() {
    std::process::exit(sepcov::cli::run(std::env::args_os()));
}
