fn main() {
    std::process::exit(aio_core::harness::cli_main());
}
