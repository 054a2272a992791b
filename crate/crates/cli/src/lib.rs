//! Library behind the `chaoslab` binary: config parsing, the experiment
//! runner, the self-test and the results summary.

pub mod config;
pub mod output;
pub mod report;
pub mod runner;
pub mod selftest;

pub const EXIT_OK: i32 = 0;
/// Config, I/O or engine errors.
pub const EXIT_ERROR: i32 = 1;
/// At least one bound violation.
pub const EXIT_FAIL: i32 = 2;
/// No violation, but a theorem hypothesis did not hold.
pub const EXIT_HYPOTHESIS: i32 = 3;
