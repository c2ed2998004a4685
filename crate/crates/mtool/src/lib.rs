//! Tool layer: file formats, expression parsing, and report rendering for
//! the measure workbench CLI.

use std::fmt;

pub mod expr;
pub mod formats;
pub mod report;

/// A syntax error with its position; maps to exit code 2.
#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, col {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}
