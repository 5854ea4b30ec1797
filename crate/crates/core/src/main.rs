fn main() {
    std::process::exit(fdrthresh::cli::run());
}
