fn main() {
    std::process::exit(jtcalc_cli::run(std::env::args_os()));
}
