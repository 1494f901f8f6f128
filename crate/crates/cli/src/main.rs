fn main() {
    std::process::exit(switchwalk_cli::run(std::env::args_os()));
}
