//! Problem files, the built-in catalog, report rendering and the Numerov
//! cross-check used by the `aimkit` binary.

pub mod catalog;
pub mod oracle;
pub mod problem;
pub mod report;
