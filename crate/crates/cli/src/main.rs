fn main() {
    std::process::exit(ineqcert::run(std::env::args_os()));
}
