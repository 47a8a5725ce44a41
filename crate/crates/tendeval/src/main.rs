fn main() {
    std::process::exit(tendeval::cli::run(std::env::args_os()));
}
