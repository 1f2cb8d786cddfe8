//! Command line and HTTP front end for the `cbe-core` sizing engine.
//!
//! Both front ends take the same flat parameters ([`params::Params`]), run
//! the same command functions ([`ops`]) and emit the same JSON report
//! ([`report`]).

pub mod cli;
pub mod error;
pub mod ops;
pub mod params;
pub mod report;
pub mod server;
