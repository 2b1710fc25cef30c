fn main() {
    std::process::exit(opial_ts::cli::run(std::env::args_os()));
}
