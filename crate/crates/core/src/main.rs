fn main() {
    std::process::exit(sumdenoise::cli::run(std::env::args_os()));
}
