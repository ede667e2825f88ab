fn main() {
    let code = parreg::harness::cli::run(std::env::args_os());
    std::process::exit(code);
}
