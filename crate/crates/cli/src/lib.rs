//! Front end for the `torcode` binary: command implementations, text
//! rendering and SVG plots.

pub mod commands;
pub mod render;
pub mod svg;
