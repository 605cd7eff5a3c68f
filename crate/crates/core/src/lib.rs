//! Anticommutativity of skew elements in group rings with an oriented
//! involution.
//!
//! The crate has two independent routes to the same answer: a brute-force
//! oracle that multiplies skew generators in `RG` ([`grouprings`]), and a
//! classifier that decides from group, involution, ring and orientation
//! data alone ([`classifier`]). [`harness`] runs both over enumerated
//! instances and reports disagreements.

pub mod classifier;
pub mod grouprings;
pub mod groups;
pub mod harness;
pub mod orientations;
pub mod rings;

pub use classifier::{
    classify, classify_classic, classify_exp_two_kernel, classify_plain, necessary_conditions,
    CaseLabel, ClassificationVerdict, ClassifierError, PlainReading,
};
pub use grouprings::{oracle_anticommutative, GroupRingElem, GroupRingError, OracleVerdict};
pub use groups::{
    build_group, catalog, parse_group_spec, Family, Group, GroupError, Involution, InvolutionError,
};
pub use orientations::{enumerate_orientations, InstanceContext, Orientation, OrientationError};
pub use rings::{make_ring, parse_ring_spec, Ring, RingElem, RingError};
