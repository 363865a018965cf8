fn main() {
    std::process::exit(budget_ratio::cli::main_with_args(std::env::args_os().collect()));
}
