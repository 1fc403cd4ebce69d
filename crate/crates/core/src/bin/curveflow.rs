fn main() {
    std::process::exit(curveflow::cli::run(std::env::args_os()));
}
