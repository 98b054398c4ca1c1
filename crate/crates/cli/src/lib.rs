//! IO, file formats and the command-line surface for `weakval-core`.

pub mod commands;
pub mod output;
pub mod parallel;
pub mod table;
