fn main() -> std::process::ExitCode {
    sheafctx::cli::main()
}
