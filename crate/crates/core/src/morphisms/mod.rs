//! Maps between ends and between trees: moduli of continuity, concave
//! majorants, induced tree maps, induced end maps, equivalence, homotopies
//! and the non-rooted distortion bound.

mod checks;
mod endmap;
mod ends;
mod homotopy;
mod majorant;
mod modulus;
mod nonrooted;
mod pl;
mod radial;

pub use checks::{
    all_pairs, breakpoint_points, check_bornologous, check_lipschitz1, check_metrically_proper, properness_witness,
    sample_pairs, sample_point, sufficient_source_level, BornologousReport, LipschitzReport, LipschitzWitness,
    ProperFailure, ProperReport, PropernessWitness, RadiusWitness,
};
pub use endmap::EndMap;
pub use ends::{component_map, component_map_at, induce_end_map, maps_equivalent, ComponentMap, ComponentPair, EquivalenceReport};
pub use homotopy::{
    homotopy_bound_check, homotopy_component_check, homotopy_eval, ComponentStayReport, HomotopyBoundReport,
    HomotopySample, INEQUALITY_TOLERANCE,
};
pub use majorant::{concave_majorant, ConcaveMajorant};
pub use modulus::{modulus_of, StepModulus};
pub use nonrooted::{nonrooted_end_map, reroot, rerooted_end_space, BoundViolation, NonRootedOffset, NonRootedReport};
pub use pl::PiecewiseLinear;
pub use radial::{induce_tree_map, induce_tree_map_detailed, InducedTreeMap, RadialTreeMap};
