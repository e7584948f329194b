//! Shape graphs with basic multiplicities over typed graphs.

pub mod analysis;
pub mod canon;
pub mod chargen;
pub mod cli;
pub mod format;
pub mod graph;
pub mod interval;
pub mod learner;
pub mod shape;
pub mod symbol;
pub mod validate;
pub mod witness;

pub use graph::{Graph, TypeSet, TypedGraph, Typing};
pub use interval::{Interval, Multiplicity};
pub use shape::{Context, ShapeGraph};
pub use symbol::{Label, NodeId, TypeName};
