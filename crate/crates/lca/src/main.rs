use std::process::exit;

fn main() {
    exit(lca::cli::run_main(std::env::args_os()));
}
