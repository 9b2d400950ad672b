//! Generalized class groups `I_O(m)/P_{O,Λ}(m)` of imaginary quadratic orders and
//! their free, transitive actions on oriented elliptic curves with level structure.

pub mod arith;
pub mod congruence;
pub mod curvefield;
pub mod error;
pub mod lab;
pub mod oriented;
pub mod quadforms;

pub use error::{Error, Result};

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;
