//! The `odyn` command line tool: the `.odf` family format and the commands
//! that expose enumeration, generation, heaps and connective structures.

pub mod commands;
pub mod format;

pub use commands::{run, Outcome};
pub use format::{parse_family, parse_open_dynamics, serialize_open_dynamics, FamilyDocument, ParseError};
