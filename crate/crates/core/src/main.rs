fn main() {
    std::process::exit(incex::cli::run(std::env::args_os()));
}
