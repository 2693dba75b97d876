use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use rgf_records::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let code = match cli::run(&args, &mut out, &mut err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    };
    if out.flush().is_err() {
        return ExitCode::from(cli::EXIT_MISMATCH);
    }
    ExitCode::from(code)
}
