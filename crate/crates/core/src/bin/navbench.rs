fn main() {
    std::process::exit(osmag_nav::cli::run(std::env::args_os()));
}
