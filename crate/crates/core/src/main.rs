fn main() {
    let code = iwskew::cli::run_cli(std::env::args_os());
    std::process::exit(code);
}
