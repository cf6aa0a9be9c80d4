fn main() {
    std::process::exit(yamabe_ancients::cli::run(std::env::args_os()));
}
