//! Windowed aggregation over ordered rows, with constant-memory extremum
//! tracking that spills to disk when a window outgrows its budget.
//!
//! The crate is layered bottom-up:
//!
//! * [`frames`] resolves a frame declaration to concrete row intervals.
//! * [`aggregators`] holds add/remove accumulator state for the aggregate
//!   functions.
//! * [`maxdeque`] is the in-memory count-compressed monotonic deque behind
//!   sliding MIN/MAX.
//! * [`spill`] extends that deque with a paged on-disk prefix so the working
//!   set stays bounded.
//! * [`executor`] plans a strategy per query and sweeps the column.
//! * [`analysis`] quantifies how long the deque is expected to stay, exactly
//!   and by simulation.
//! * [`cli`] wires it all to a command line over CSV files.

pub mod aggregators;
pub mod analysis;
pub mod cli;
pub mod error;
pub mod executor;
pub mod frames;
pub mod maxdeque;
pub mod spill;
pub mod value;

pub use error::{Error, Result};
