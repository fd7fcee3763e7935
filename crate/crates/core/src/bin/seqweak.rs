fn main() {
    std::process::exit(seqweak::cli::run(std::env::args_os()));
}
