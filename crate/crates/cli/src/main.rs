use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use pctlwb_cli::{execute, Cli, Outcome};

fn persist(out: &Outcome) -> anyhow::Result<()> {
    out.persist().context("writing outputs")?;
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(out.report.as_bytes())?;
    if out.manifest_path.is_none() {
        eprintln!("{}", out.manifest.to_json());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => match persist(&out) {
            Ok(()) => ExitCode::from(out.code),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
