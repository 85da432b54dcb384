fn main() {
    std::process::exit(affmin::cli::run(std::env::args_os()));
}
