pub mod coarse;
pub mod order;
pub mod restrict;
pub mod section;
pub mod selftest;
pub mod state;

use crate::errors::CliResult;
use crate::report::Report;

/// Every command produces a report plus its exit code (0 or 2; input and
/// numeric failures travel as errors and map to 3 and 4).
pub type CommandOutcome = CliResult<(Report, i32)>;
