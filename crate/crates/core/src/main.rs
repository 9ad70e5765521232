fn main() {
    std::process::exit(founderrank::cli::run(std::env::args_os()));
}
