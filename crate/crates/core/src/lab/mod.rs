//! End-to-end certification of generalized class group actions, the suborder
//! correspondence on a volcano, vectorization and graph export.

mod certificate;
mod certify;
mod engine;
mod graph;
mod presets;
mod vectorize;
mod volcano;

pub use certificate::{Certificate, Check, Scenario};
pub use certify::{certify_action, certify_engine, module_generator_check, scenario_of};
pub use engine::{choose_generators, ActionEngine, GENERATOR_PRIME_BOUND};
pub use graph::{action_dot, volcano_dot};
pub use presets::{
    eigen_prime, eigenvector, floor_curves, floor_scenario, fullgroup, gpv, integers, nthpower, Preset, PresetRun,
};
pub use vectorize::vectorize;
pub use volcano::{
    ab_ideal_check, admits_orientation, build_volcano, kernel_of, suborder_equivalence, surface_level_set, AbSummary,
    Edge, EdgeKind, VolcanoInstance,
};
