use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let code = nacirc_cli::run(std::env::args_os(), &mut stdin.lock(), &mut stdout.lock(), &mut io::stderr());
    ExitCode::from(code as u8)
}
