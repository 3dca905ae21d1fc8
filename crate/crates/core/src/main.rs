fn main() -> std::process::ExitCode {
    stathyp::cli::main()
}
