fn main() {
    std::process::exit(poptlab::cli::run(std::env::args_os()));
}
