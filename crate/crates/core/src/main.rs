fn main() -> std::process::ExitCode {
    gl2skein::cli::main()
}
