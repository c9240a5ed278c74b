//! Documents, reports, the fuzz harness and the command-line driver.

pub mod cli;
pub mod commands;
pub mod document;
pub mod fuzz;
pub mod report;

pub use cli::{run_command, Outcome};
pub use document::{emit_document, parse, Document, Kind, ParseError, Payload, SchemaError};
pub use report::{emit_report, Mode, Report, Verdict};
