fn main() -> std::process::ExitCode {
    pme_green::scenario::cli::main()
}
