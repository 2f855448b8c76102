//! Command-line front end for the `pchi` library: JSON documents for
//! diagrams and measures, the `validate`, `limit`, `chi`, `glue`, `lift` and
//! `search` commands, and replay of saved reports.

pub mod commands;
pub mod document;
pub mod error;
pub mod report;

pub use commands::{run, Execution};
