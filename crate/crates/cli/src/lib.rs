//! Pipeline driver and machine-readable reports for the `csvol` binary.

pub mod pipeline;
pub mod report;

pub use pipeline::{run, Command, RunOptions};
pub use report::RunReport;
