fn main() {
    let code = posrank::cli::run(std::env::args_os());
    std::process::exit(code);
}
