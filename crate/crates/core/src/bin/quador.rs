fn main() {
    std::process::exit(quador_fillet::cli::run(std::env::args_os()));
}
