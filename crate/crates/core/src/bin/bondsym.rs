fn main() {
    std::process::exit(bondsym::cli::run(std::env::args_os()));
}
