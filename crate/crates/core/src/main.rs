fn main() -> std::process::ExitCode {
    embodied_safety::harness::cli::main()
}
