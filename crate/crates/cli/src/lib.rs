//! Command-line front end: JSON workspaces, Graphviz output, batteries.

pub mod battery;
pub mod commands;
pub mod dot;
pub mod workspace;

pub use commands::{run, Cli, Outcome};
