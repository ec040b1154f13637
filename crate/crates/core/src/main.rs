fn main() {
    std::process::exit(epslens::cli::run(std::env::args_os()));
}
