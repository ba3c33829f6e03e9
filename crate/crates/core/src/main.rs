fn main() {
    let code = swarmrl::cli::main(std::env::args_os());
    std::process::exit(code);
}
