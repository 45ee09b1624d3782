fn main() {
    std::process::exit(rqsl_cli::run(std::env::args_os()));
}
