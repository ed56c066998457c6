fn main() {
    std::process::exit(solitonlab::run(std::env::args_os()));
}
