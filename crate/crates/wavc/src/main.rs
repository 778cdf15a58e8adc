use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("AVC_LOG")).init();
    ExitCode::from(wavc::cli::run(std::env::args_os()) as u8)
}
