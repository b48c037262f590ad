//! File formats, export, the command-line front end and the acceptance
//! harness for `posetahedra-core`.

pub mod app;
pub mod corpus;
pub mod export;
pub mod formats;
pub mod harness;

pub use app::run;
