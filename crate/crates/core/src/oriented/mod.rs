//! Oriented curves, ideal kernels, and the action of generalized class groups on
//! curves with level structure.

mod action;
mod kernel;
mod level;
mod orientation;

pub use action::{act_on_curve, act_with_points, canonical_oriented, is_actionable, prime_step};
pub use kernel::{
    descending_kernels, ideal_kernel, ideal_kernel_at, ideal_kernel_level, ideal_torsion, is_module_generator,
    module_generator, module_generator_constructive, prime_kernel, prime_kernel_level,
};
pub use level::{
    act_on_levelled, enumerate_levelled, group_automorphisms, CoordMap, Flavor, GammaSpec, LevelSpace, LevelledCurve,
};
pub use orientation::{sigma_eval, Orientation, OrientedCurve};
