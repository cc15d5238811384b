fn main() {
    std::process::exit(tractorlab::dispatch(std::env::args_os()));
}
