fn main() {
    std::process::exit(ecbrake::io::cli::run(std::env::args_os()));
}
