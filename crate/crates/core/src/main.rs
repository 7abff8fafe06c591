fn main() {
    std::process::exit(tpstokes::cli::run(std::env::args_os()));
}
