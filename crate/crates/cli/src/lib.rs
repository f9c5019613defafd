//! Model format, query runner and reports for the `wsbn` command.

pub mod dsl;
pub mod report;
pub mod run;
pub mod witness;
