fn main() {
    let code = polarmap::cli::run_with_io(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
