fn main() -> std::process::ExitCode {
    bsa_service::cli::main()
}
