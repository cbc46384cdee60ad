fn main() {
    std::process::exit(succinct_dfs::cli::main_with_args(std::env::args_os()));
}
