//! Process exit codes: 0 success, 1 analysis error, 2 IO or schema error,
//! 3 configuration error.

use std::fmt;

pub const ANALYSIS: i32 = 1;
pub const IO: i32 = 2;
pub const CONFIG: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

fn core_code(e: &matchflow::Error) -> i32 {
    use matchflow::Error as E;
    match e {
        E::EmptyInput | E::MissingColumn(_) | E::Csv(_) | E::ImputationImpossible { .. } => IO,
        E::Config(_) | E::UnknownIndicator(_) | E::Spec(_) | E::MissingRandomIndex(_) => CONFIG,
        _ => ANALYSIS,
    }
}

/// Exit code for the first recognised error in the chain.
pub fn code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Config(_) => CONFIG,
                CliError::Io(_) => IO,
            };
        }
        if let Some(e) = cause.downcast_ref::<matchflow::Error>() {
            return core_code(e);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<serde_json::Error>().is_some() {
            return IO;
        }
        if cause.downcast_ref::<toml::de::Error>().is_some() {
            return CONFIG;
        }
    }
    ANALYSIS
}
