//! Usage reports and the command-line front end.

mod cli;
mod report;

pub use cli::{run_cli, EXIT_BUDGET, EXIT_FAILED, EXIT_INPUT, EXIT_OK};
pub use report::{emit, property_usage_table, Format, PairRow, PropertyRow, UsageReport, TOOL_VERSION};
