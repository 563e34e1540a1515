//! Test support for odyn: hand-built fixtures, seeded random corpora, and
//! brute-force evaluators that follow the definitions directly.
//!
//! The evaluators in [`oracle`] only read data out of the core types
//! (state sets, transition images, dates); they never call the algorithms
//! they are used to check.

pub mod fixtures;
pub mod oracle;
pub mod random;
