fn main() {
    let code = triform::cli::run(std::env::args_os());
    std::process::exit(code);
}
