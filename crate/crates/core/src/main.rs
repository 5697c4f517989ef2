fn main() {
    std::process::exit(minlift::cli::main_with_args(std::env::args_os()));
}
