use clap::Parser;
use slabnoise_cli::{execute, Cli};
use std::io::Write;

fn main() {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(output) => {
            let mut out = std::io::stdout().lock();
            let result = out.write_all(output.as_bytes()).and_then(|()| {
                if output.ends_with('\n') {
                    Ok(())
                } else {
                    out.write_all(b"\n")
                }
            });
            if let Err(e) = result {
                // a closed pipe (e.g. piping into `head`) is not an error
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    return;
                }
                eprintln!("error: {e}");
                std::process::exit(2);
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
