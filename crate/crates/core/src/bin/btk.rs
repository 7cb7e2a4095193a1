fn main() {
    std::process::exit(bt_control::cli::run(std::env::args_os()));
}
