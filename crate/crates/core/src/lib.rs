//! Exact computations in deformation spaces of trees: graphs of groups,
//! Bass–Serre trees, folding paths and simplex coordinates.

pub mod corpus;
pub mod folding;
pub mod graph;
pub mod moves;
pub mod normal;
pub mod rational;
pub mod section;
pub mod topology;
pub mod treegeom;
pub mod word;

pub use graph::{Edge, End, GraphOfGroups, GroupKind, Vertex};
pub use rational::Rational;
pub use word::{BaseWord, Letter, Word};
