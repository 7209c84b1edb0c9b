fn main() {
    std::process::exit(algobelief_bench::cli::main_with(std::env::args_os()));
}
