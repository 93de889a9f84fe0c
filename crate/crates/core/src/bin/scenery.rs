fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(scenery::cli::main_with_args(std::env::args_os().collect()).code())
}
