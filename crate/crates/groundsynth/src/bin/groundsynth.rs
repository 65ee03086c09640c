fn main() {
    std::process::exit(groundsynth::cli::run(std::env::args_os()));
}
