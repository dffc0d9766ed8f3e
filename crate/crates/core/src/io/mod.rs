//! Configuration files and run output.

pub mod config;
pub mod output;

pub use config::{emit_config, parse_config, Overrides, ResolvedRun, RunConfig};
pub use output::{
    read_snapshot, timeseries_text, write_snapshot, write_timeseries, Snapshot, TimeSeriesRecord,
    TIMESERIES_HEADER,
};
