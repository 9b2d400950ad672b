//! Finite fields, elliptic curves, pairings and isogenies.

mod curve;
mod field;
mod floor;
mod pairing;
mod velu;

pub use curve::{join_level, Curve, Point, PointRecord};
pub use field::{Fe, Field, Tower, MAX_LEVEL};
pub use floor::supersingular_floor_set;
pub use pairing::{dlog_2d, dlog_cyclic, dlog_field, dlog_points, torsion_basis, torsion_level, weil_pairing};
pub use velu::{subgroup, velu, Isogeny, MAX_KERNEL};
