//! Report format and exit statuses of the `fingram` command-line tool.

pub mod report;

pub use report::{Block, Report, ReportError};

/// Exit status of a successful command or a proven claim.
pub const EXIT_OK: i32 = 0;
/// A claim was refuted or an input violates its format.
pub const EXIT_REFUTED: i32 = 1;
/// The budget ran out before the question was settled.
pub const EXIT_UNKNOWN: i32 = 3;
/// Unreadable input or a failed operation.
pub const EXIT_ERROR: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Unknown,
    Refuted,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => EXIT_OK,
            Status::Refuted => EXIT_REFUTED,
            Status::Unknown => EXIT_UNKNOWN,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Refuted => "refuted",
            Status::Unknown => "unknown",
        }
    }
}
