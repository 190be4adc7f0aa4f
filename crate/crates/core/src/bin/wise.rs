use std::io::{self, Write};
use std::process::ExitCode;
use std::thread;

// Path conditions and store expressions are deep trees; long explorations
// need more stack than the main thread gets.
const STACK_SIZE: usize = 1 << 30;

fn main() -> ExitCode {
    let worker = thread::Builder::new().stack_size(STACK_SIZE).spawn(|| {
        let stdout = io::stdout();
        let stderr = io::stderr();
        let mut out = stdout.lock();
        let mut err = stderr.lock();
        let code = wise::cli::main_with(std::env::args_os(), &mut out, &mut err);
        let _ = out.flush();
        code
    });
    let code = match worker.map(|h| h.join()) {
        Ok(Ok(code)) => code,
        _ => wise::cli::EXIT_INTERNAL,
    };
    ExitCode::from(code as u8)
}
