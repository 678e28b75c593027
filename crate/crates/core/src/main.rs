fn main() {
    std::process::exit(shiftdc::cli::main_with(std::env::args_os()));
}
