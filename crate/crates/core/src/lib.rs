//! Core of the jbender code search engine.
//!
//! The crate is split along the data flow: [`ingest`] turns a metadata
//! dataset into a contribution matrix and vote vector, [`trustcore`] derives
//! developer karma and project trustability from them, [`codeindex`] extracts
//! Java-flavored code entities and builds a persistent inverted index, and
//! [`search`] answers structured queries against that index with results
//! annotated by their project's trust.

pub mod codeindex;
mod ids;
pub mod ingest;
pub mod search;
pub mod trustcore;

pub use ids::{DeveloperId, ProjectId};
