fn main() {
    std::process::exit(dmjac::cli::run(std::env::args_os()));
}
