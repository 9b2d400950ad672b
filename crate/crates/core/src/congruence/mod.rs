//! Congruence subgroups and generalized class groups.

mod audit;
mod group;
mod lambda;
mod residue;
mod suborder;

pub use audit::{exact_sequence_audit, Prediction, SequenceAudit};
pub use group::{gen_class_group, in_congruence_subgroup, kernel_of_projection, Congruence, GenClassGroup};
pub use lambda::{delta, LambdaSet};
pub use residue::{residue_ring, Modulus, UnitGroup};
pub use suborder::{suborder_transport, SuborderTransport};
