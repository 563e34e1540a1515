//! Open graphic dynamics.
//!
//! A *dynamics* attaches a set of states to every vertex of a finite directed
//! multigraph (its *motor*) and a set-valued transition to every edge. Clocks
//! are deterministic dynamics whose states are instants; a datation sends every
//! state to an instant of the same vertex. An *open dynamics* is a
//! parameter-indexed family of dynamics sharing one clock and one datation.
//!
//! Several open dynamics coupled by an interaction (a multiple binary relation
//! between their realizations and their parameters) form a dynamic family,
//! and a family produces new open dynamics:
//!
//! - the primo-generated dynamics, see [`family::primo_generated`];
//! - its parametric quotients by functional heaps, flexible (blocked) heaps,
//!   or the total equivalence, see [`family::generate`].
//!
//! All structures are finite, immutable once built, and ordered canonically
//! (lexicographic order on identifier strings).

pub mod dynamics;
pub mod family;
pub mod graph;
pub mod multirel;
pub mod open;
pub mod transition;

pub use dynamics::{Assignment, Clock, Dynamics, Dynamorphism, ScannedDynamics};
pub use family::{DynamicFamily, GenerationMode, HeapFamily, Interaction, Synchronization};
pub use graph::{Edge, Graph, GraphMorphism};
pub use multirel::{BinaryMultipleRelation, Entry, MultipleRelation, PartialFamily, Side};
pub use open::{MultiDynamics, OpenDynamics, OpenRealization, ParamEquivalence};
pub use transition::{Determinism, Transition, TransitionFamily};

/// Vertex identifier of a motor.
pub type VertexId = String;
/// Edge identifier of a motor.
pub type EdgeId = String;
/// State identifier. Instants of a clock are states of that clock.
pub type StateId = String;
/// Instant identifier (a state of a clock).
pub type InstantId = String;
/// Parameter value identifier.
pub type ParamId = String;
/// Index of a component within a dynamic family.
pub type ComponentId = String;
