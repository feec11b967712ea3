//! File formats, configuration, and verification suites for the online
//! vertex subset game toolkit.
//!
//! The formats are line-oriented text: a structured instance format holding
//! the problem, budget, formula, and the role-tagged graph; a transcript
//! format with one record per game turn; DOT export with the gadget
//! connecting edges dashed; and a small TOML run configuration pointed to by
//! the `OVSG_CONFIG` environment variable.

pub mod config;
pub mod dot;
pub mod instance;
pub mod transcript;
pub mod verify;

use std::fmt;

/// Errors from reading or writing any of the text formats.
#[derive(Debug)]
pub struct FormatError {
    pub line: Option<usize>,
    pub message: String,
}

impl FormatError {
    pub fn new(message: impl Into<String>) -> Self {
        FormatError { line: None, message: message.into() }
    }

    pub fn at(line: usize, message: impl Into<String>) -> Self {
        FormatError { line: Some(line), message: message.into() }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for FormatError {}

/// Process exit codes shared by all subcommands.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const CAP: i32 = 4;
    pub const ADVERSARY_WINS: i32 = 10;
}
