//! Exit-code mapping and report plumbing.
//!
//! Any computed answer (including boolean `false` and range-mismatch
//! verdicts) exits 0. Usage and syntax problems exit 2, validation
//! failures 3, budget and stage limits 4.

use crate::formats::ToolError;
use mtool_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

pub fn exit_code_for(err: &ToolError) -> i32 {
    match err {
        ToolError::Parse(_) => EXIT_USAGE,
        ToolError::Core(core) => match core {
            Error::BudgetExceeded { .. } | Error::StageBudgetExceeded(_) => EXIT_BUDGET,
            _ => EXIT_VALIDATION,
        },
    }
}

/// A finished report: payload on stdout, echo and diagnostics on stderr.
pub struct Report {
    pub echo: String,
    pub payload: String,
    pub exit: i32,
}

impl Report {
    pub fn ok(echo: String, payload: String) -> Report {
        Report {
            echo,
            payload,
            exit: EXIT_OK,
        }
    }

    pub fn emit(self) -> i32 {
        eprintln!("# {}", self.echo);
        if !self.payload.is_empty() {
            println!("{}", self.payload.trim_end_matches('\n'));
        }
        self.exit
    }
}
