use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = checkers_cli::run(std::env::args_os());
    let rendered = result.render();
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(rendered.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(result.status.exit_code() as u8)
}
