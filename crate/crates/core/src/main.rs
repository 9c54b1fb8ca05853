use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = qgaudin::cli::run(std::env::args_os());
    for d in &outcome.diagnostics {
        eprintln!("{}", d.trim_end());
    }
    let written = match &outcome.out {
        Some(path) => std::fs::write(path, &outcome.output).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(outcome.output.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(qgaudin::cli::EXIT_USAGE as u8);
    }
    ExitCode::from(outcome.code as u8)
}
