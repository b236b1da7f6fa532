fn main() {
    std::process::exit(plasmon_focus::cli::main_with_args(std::env::args_os()));
}
