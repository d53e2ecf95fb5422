fn main() {
    std::process::exit(insider::cli::main_with_args(std::env::args_os()));
}
