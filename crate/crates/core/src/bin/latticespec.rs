fn main() -> std::process::ExitCode {
    latticespec::cli::main()
}
