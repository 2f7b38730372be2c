fn main() {
    std::process::exit(respmot::cli::run(std::env::args_os()));
}
