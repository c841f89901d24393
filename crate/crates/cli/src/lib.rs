//! Command-line driver: configuration, corpus listing, check execution and
//! report emission. The binary is a thin wrapper around [`run_cli`].

pub mod config;
pub mod error;
pub mod report;
pub mod run;

use std::ffi::OsString;

use clap::Parser;

use config::{Cli, Command, CorpusAction};
use error::CliError;

/// Exit status: 0 all checks pass, 1 some check fails, 2 configuration
/// error, 3 runtime error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Corpus {
            action: CorpusAction::List,
        } => {
            print!("{}", run::corpus_list());
            Ok(0)
        }
        Command::Corpus {
            action: CorpusAction::Describe { name },
        } => {
            print!("{}", run::corpus_describe(&name)?);
            Ok(0)
        }
        Command::Verify(args) => {
            let cfg = args.resolve()?;
            let mut outcomes = run::execute(&cfg)?;
            let report = run::emit(&cfg, &mut outcomes)?;
            for entry in &report.checks {
                println!("{}", run::summary_line(entry));
            }
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            if failed == 0 {
                println!("all {} checks passed", report.checks.len());
                Ok(0)
            } else {
                println!("{failed} of {} checks failed", report.checks.len());
                Ok(1)
            }
        }
    }
}
