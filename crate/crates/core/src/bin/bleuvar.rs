fn main() -> std::process::ExitCode {
    bleuvar::cli::main()
}
