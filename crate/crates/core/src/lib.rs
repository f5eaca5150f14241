//! Exact kernel for rooted R-trees and their end spaces.
//!
//! Geodesically complete rooted R-trees and complete ultrametric spaces of
//! diameter at most 1 are two views of the same objects. This crate works
//! with finite presentations of both and moves between them:
//!
//! * [`ultrametric`]: finite ultrametric spaces, validation, balls, partitions.
//! * [`tree`]: rooted tree presentations in level coordinates, exact points,
//!   distances, cut sets, pruning, canonical forms and rooted isometry.
//! * [`duality`]: the end space of a tree and the tree of an ultrametric space.
//! * [`morphisms`]: moduli of continuity, concave majorants, induced tree maps,
//!   induced end maps, equivalence and homotopy checks.
//! * [`simplicial`]: Freudenthal ends of locally finite simplicial trees.
//!
//! Depth `t` is stored as the level `u = e^{-t}` and tree distances `s` as
//! `q = e^{s}`, so all decidable predicates are exact rational comparisons.

pub mod duality;
pub mod error;
pub mod generate;
pub mod morphisms;
pub mod rational;
pub mod simplicial;
pub mod tree;
pub mod ultrametric;

pub use duality::{ends_of, roundtrip_tree_check, roundtrip_ultrametric_check, tree_of, EndSpaceView};
pub use error::{Error, Result};
pub use morphisms::{
    concave_majorant, induce_end_map, induce_tree_map, maps_equivalent, modulus_of, ConcaveMajorant, EndMap,
    PiecewiseLinear, RadialTreeMap, StepModulus,
};
pub use rational::{parse_rational, Level, Rational, TreeDistance, UDistance};
pub use tree::{ApproxPoint, Component, LeafKind, NodeId, TreePoint, TreePresentation};
pub use simplicial::{freudenthal, FreudenthalReport, SimplicialTreeInput};
pub use ultrametric::{validate_ultrametric, FiniteUltrametricSpace, ValidationReport};
