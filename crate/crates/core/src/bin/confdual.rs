fn main() -> std::process::ExitCode {
    confdual::cli::main()
}
