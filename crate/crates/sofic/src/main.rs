use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let code = sofic::cli::run(std::env::args_os(), &mut stdin.lock(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
