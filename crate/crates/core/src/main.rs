fn main() -> std::process::ExitCode {
    rootgas::cli::main()
}
