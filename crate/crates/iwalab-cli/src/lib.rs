//! Library side of the `iwalab` binary: configuration, suites and reports.

pub mod config;
pub mod report;
pub mod suites;
