fn main() {
    std::process::exit(few::cli::run(std::env::args_os()));
}
