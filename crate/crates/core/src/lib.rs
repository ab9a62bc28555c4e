//! Orientations of multigraphs whose out-degrees avoid forbidden sets with
//! no two consecutive values.

pub mod constraints;
pub mod construct;
pub mod decision;
pub mod digest;
pub mod gen;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod orientation;

pub use io::Instance;
