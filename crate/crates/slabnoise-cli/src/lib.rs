//! Library half of the `slabnoise` binary: subcommand implementations live
//! here so integration tests can drive them without spawning processes.

pub mod cli;
pub mod config;
pub mod scenarios;
pub mod units;

pub use cli::{execute, Cli, CliError};

/// Parse argv-style arguments and run; the Ok value is the stdout payload.
pub fn run_from<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Usage(e.to_string()),
    })?;
    execute(&cli)
}
