//! Batch jobs over `rbslab-core`: named computations, JSON and CSV
//! reports, an on-disk result cache and the acceptance grid.

pub mod cache;
pub mod grid;
pub mod job;
pub mod report;
pub mod run;

pub use cache::{Cache, CACHE_DIR_VAR};
pub use job::{Command, JobSpec, UsageError};
pub use report::{Report, Status};
pub use run::{run, RunOptions};
