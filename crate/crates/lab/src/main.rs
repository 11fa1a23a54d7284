fn main() {
    std::process::exit(nslab::main_with(std::env::args_os()));
}
