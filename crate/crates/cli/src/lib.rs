//! Command-line frontend for `sgl-core`: operator arithmetic, cocycle
//! evaluation, the theorem table and verification sweeps, all with exact
//! rational output.

pub mod commands;
pub mod parse;
pub mod report;

pub use commands::{run, Cli, Command, RunError};
pub use parse::{parse_degrees, parse_expr, ParseError};
pub use report::{Entry, Format, Report, Status};

/// Bounds enforced before any computation.
pub mod limits {
    pub const MAX_RANK: usize = 6;
    pub const MAX_ABS_BETA: i64 = 100;
    pub const MAX_RANGE: i64 = 24;
    pub const MAX_SAMPLES: usize = 100_000;

    /// Defaults for sweeps: every rank in `1..=3`, every twist in `-2..=3`, degrees up to 6.
    pub const DEFAULT_RANKS: std::ops::RangeInclusive<usize> = 1..=3;
    pub const DEFAULT_BETAS: std::ops::RangeInclusive<i64> = -2..=3;
    pub const DEFAULT_RANGE: i64 = 6;
}
