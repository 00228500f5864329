fn main() {
    std::process::exit(deco_krylov::cli::run(std::env::args_os()));
}
