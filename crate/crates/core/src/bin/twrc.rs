fn main() {
    std::process::exit(twrc::harness::main_with_args(std::env::args_os().collect()));
}
