//! Command-line and HTTP front end for the jbender code search.

pub mod cli;
pub mod http;
pub mod report;
pub mod table;

#[cfg(test)]
mod testutil;
