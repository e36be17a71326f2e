fn main() {
    std::process::exit(insram_ntt::cli::run_cli(std::env::args_os()));
}
