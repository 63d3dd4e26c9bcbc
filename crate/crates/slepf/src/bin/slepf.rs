fn main() { std::process::exit(slepf::cli::main()) }
