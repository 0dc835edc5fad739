fn main() -> std::process::ExitCode {
    interband::cli::main_entry()
}
