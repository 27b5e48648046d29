fn main() {
    std::process::exit(native_graph_cli::main_with_env());
}
