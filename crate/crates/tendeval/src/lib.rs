//! File formats, reports, SVG figures and the command line for
//! [`tendeval_core`].

pub mod cli;
pub mod io;
pub mod report;
pub mod svg;

pub use report::{EvalReport, SCHEMA_VERSION, TOOL_VERSION};
