//! Ready-made scenarios on supersingular floors `Ell(Z[√−p])` over `F_p`.

use super::certificate::Certificate;
use super::certify::certify_action;
use super::engine::ActionEngine;
use crate::congruence::{gen_class_group, LambdaSet, Modulus};
use crate::curvefield::supersingular_floor_set;
use crate::error::{Error, Result};
use crate::oriented::{Flavor, GammaSpec, LevelSpace, OrientedCurve};
use crate::quadforms::{order_from_disc, splitting_type, QuadIdeal, QuadOrder, SplitType};

/// The floor curves with the Frobenius orientation by `Z[√−p]`.
pub fn floor_curves(p: u64) -> Result<(QuadOrder, Vec<OrientedCurve>)> {
    let disc = -4 * p as i64;
    let o = order_from_disc(disc)?;
    let curves = supersingular_floor_set(p)?
        .into_iter()
        .map(|e| OrientedCurve::from_frobenius(e, disc))
        .collect::<Result<Vec<_>>>()?;
    Ok((o, curves))
}

/// Certifies `Cl_{O,Λ}(m)` acting on `Z_{Γ_{O,Λ}(m)}` over the floor of `F_p`.
pub fn floor_scenario(
    label: &str,
    p: u64,
    modulus: impl FnOnce(&QuadOrder) -> Result<Modulus>,
    lambda: LambdaSet,
    seed: u64,
) -> Result<(Certificate, ActionEngine)> {
    let (o, curves) = floor_curves(p)?;
    let m = modulus(&o)?;
    if crate::arith::gcd(m.norm, p as i64) != 1 {
        return Err(Error::Precondition(format!("N(m) = {} is divisible by p = {p}", m.norm)));
    }
    let g = gen_class_group(&o, &m, lambda)?;
    let space = LevelSpace::new(&o, m, GammaSpec::GammaOLambda(lambda), Flavor::Z)?;
    certify_action(label, space, g, &curves, seed)
}

/// Ray class group modulo `NO` on `Z_N` (the setting with `Λ = {1}`, `m = NO`).
pub fn gpv(p: u64, n: i64, seed: u64) -> Result<(Certificate, ActionEngine)> {
    floor_scenario("gpv", p, |o| Modulus::scalar(o, n), LambdaSet::UnitOnly, seed)
}

/// The prime above `f` whose kernel is rational, i.e. `(f, √−p − λ)` with `λ` the
/// eigenvalue of Frobenius on the rational `f`-torsion; the other prime when none is.
pub fn eigen_prime(p: u64, f: i64) -> Result<QuadIdeal> {
    let (o, curves) = floor_curves(p)?;
    match splitting_type(&o, f)? {
        SplitType::Split(a, b) => {
            let rational = |q: &QuadIdeal| crate::oriented::prime_kernel_level(&curves[0], q) == Some(1);
            Ok(if rational(&a) || !rational(&b) { a } else { b })
        }
        _ => Err(Error::Precondition(format!("f = {f} does not split in Z[√−{p}]"))),
    }
}

/// Ray classes modulo a prime above a split `f`: curves with a marked eigenpoint of order `f`.
pub fn eigenvector(p: u64, f: i64, seed: u64) -> Result<(Certificate, ActionEngine)> {
    let m = eigen_prime(p, f)?;
    floor_scenario("eigenvector", p, |o| Modulus::new(o, m), LambdaSet::UnitOnly, seed)
}

/// `Λ = {k^e : k ∈ Z}` modulo `NO`.
pub fn nthpower(p: u64, n: i64, e: u32, seed: u64) -> Result<(Certificate, ActionEngine)> {
    floor_scenario("nthpower", p, |o| Modulus::scalar(o, n), LambdaSet::IntegerPowers(e), seed)
}

/// `Λ = Z` modulo `NO`.
pub fn integers(p: u64, n: i64, seed: u64) -> Result<(Certificate, ActionEngine)> {
    floor_scenario("integers", p, |o| Modulus::scalar(o, n), LambdaSet::Integers, seed)
}

/// `Λ = O`: the plain class group acting on curves.
pub fn fullgroup(p: u64, n: i64, seed: u64) -> Result<(Certificate, ActionEngine)> {
    floor_scenario("fullgroup", p, |o| Modulus::scalar(o, n), LambdaSet::FullOrder, seed)
}

/// A named scenario with its parameters, as accepted by the command line and stored in
/// vectorization instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase")]
pub enum Preset {
    Gpv { p: u64, n: i64 },
    Eigenvector { p: u64, f: i64 },
    Nthpower { p: u64, n: i64, e: u32 },
    Integers { p: u64, n: i64 },
    Fullgroup { p: u64, n: i64 },
    Suborder { q: u64, t: i64, f: i64 },
}

/// Output of a preset run: the certificate, plus the action tables for floor scenarios
/// or the volcano for the suborder scenario.
pub enum PresetRun {
    Action(Certificate, Box<ActionEngine>),
    Volcano(Certificate, Box<super::volcano::VolcanoInstance>),
}

impl PresetRun {
    pub fn certificate(&self) -> &Certificate {
        match self {
            PresetRun::Action(c, _) | PresetRun::Volcano(c, _) => c,
        }
    }

    pub fn dot(&self) -> String {
        match self {
            PresetRun::Action(_, e) => super::graph::action_dot(e),
            PresetRun::Volcano(_, v) => super::graph::volcano_dot(v),
        }
    }
}

impl Preset {
    pub fn run(&self, seed: u64) -> Result<PresetRun> {
        let action = |r: Result<(Certificate, ActionEngine)>| r.map(|(c, e)| PresetRun::Action(c, Box::new(e)));
        match *self {
            Preset::Gpv { p, n } => action(gpv(p, n, seed)),
            Preset::Eigenvector { p, f } => action(eigenvector(p, f, seed)),
            Preset::Nthpower { p, n, e } => action(nthpower(p, n, e, seed)),
            Preset::Integers { p, n } => action(integers(p, n, seed)),
            Preset::Fullgroup { p, n } => action(fullgroup(p, n, seed)),
            Preset::Suborder { q, t, f } => {
                let vi = super::volcano::build_volcano(q, t, f)?;
                let mut cert = super::volcano::suborder_equivalence(&vi, seed, false)?;
                let (ab, _) = super::volcano::ab_ideal_check(&vi, seed)?;
                for c in ab.checks {
                    cert.checks.push(super::certificate::Check { name: format!("ab_{}", c.name), ..c });
                }
                cert.runtime_ms += ab.runtime_ms;
                cert.pass = cert.verdict();
                Ok(PresetRun::Volcano(cert, Box::new(vi)))
            }
        }
    }

    /// Engine only (floor scenarios), for vectorization.
    pub fn engine(&self, seed: u64) -> Result<ActionEngine> {
        match self.run(seed)? {
            PresetRun::Action(_, e) => Ok(*e),
            PresetRun::Volcano(..) => {
                Err(Error::Precondition("the suborder preset has no level-structure action table".into()))
            }
        }
    }
}
