use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::certificate::{Certificate, Scenario};
use super::engine::ActionEngine;
use crate::congruence::{GenClassGroup, UnitGroup};
use crate::curvefield::{subgroup, torsion_basis};
use crate::error::Result;
use crate::oriented::{
    ideal_torsion, is_actionable, is_module_generator, module_generator_constructive, LevelSpace, LevelledCurve,
    OrientedCurve,
};
use crate::quadforms::{Elem, QuadIdeal};
use crate::Error;

type Outcome = std::result::Result<(), String>;

pub fn scenario_of(label: &str, space: &LevelSpace, q: u64) -> Scenario {
    let m = &space.modulus.ideal;
    Scenario {
        label: label.into(),
        q,
        disc: space.order.disc,
        modulus: (m.a, m.b, m.c),
        lambda: match space.gamma {
            crate::oriented::GammaSpec::GammaOLambda(l) => l.to_string(),
            _ => "-".into(),
        },
        gamma: space.gamma.to_string(),
        flavor: space.flavor.to_string(),
    }
}

fn distinct_curves(set: &[LevelledCurve]) -> Vec<OrientedCurve> {
    let mut seen = BTreeSet::new();
    set.iter().filter(|x| seen.insert((x.oc.curve.a, x.oc.curve.b))).map(|x| x.oc.clone()).collect()
}

/// All of `E[m]`, scanned from a basis of `E[a_m]` and filtered by the generators of `m`.
fn scan_ideal_torsion(space: &LevelSpace, oc: &OrientedCurve) -> Result<Vec<crate::curvefield::Point>> {
    let m = &space.modulus;
    let n = m.int_gen();
    let e = &oc.curve;
    let (b1, b2) = match torsion_basis(e, n as u64, space.working_level(oc)?) {
        Ok(b) => b,
        // E[a_m] is out of reach but the cyclic E[m] is not
        Err(_) => return ideal_torsion(oc, &m.ideal, crate::oriented::ideal_kernel_level(oc, &m.ideal)?),
    };
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let pt = e.lin(x as i128, &b1, y as i128, &b2);
            if oc.apply(Elem::new(m.ideal.b, m.ideal.c), &pt)?.inf {
                out.push(pt);
            }
        }
    }
    Ok(out)
}

/// On every curve: the sampled generator is valid and the exhaustive count of generators
/// is `|(O/m)^×|`. On the first curve the constructive generator (when its torsion is in
/// reach) is checked too.
pub fn module_generator_check(space: &LevelSpace, set: &[LevelledCurve]) -> Result<Outcome> {
    let units = UnitGroup::new(&space.order, &space.modulus).len();
    let norm = space.modulus.norm;
    for (idx, oc) in distinct_curves(set).into_iter().enumerate() {
        let j = oc.curve.j_invariant();
        let r = space.module_generator(&oc)?;
        if !is_module_generator(&oc, norm, &r)? {
            return Ok(Err(format!("j = {j}: sampled generator does not generate E[m]")));
        }
        let pts = scan_ideal_torsion(space, &oc)?;
        if pts.len() as i64 != norm {
            return Ok(Err(format!("j = {j}: E[m] has {} points, N(m) = {norm}", pts.len())));
        }
        let mut count = 0;
        for p in &pts {
            if subgroup(&oc.curve, &[*p, oc.sigma(p)?])?.len() as i64 == norm {
                count += 1;
            }
        }
        if count != units {
            return Ok(Err(format!("j = {j}: {count} module generators, |(O/m)^×| = {units}")));
        }
        if idx > 0 {
            continue;
        }
        match module_generator_constructive(&oc, &space.modulus.ideal) {
            Ok(p) if !is_module_generator(&oc, norm, &p)? => {
                return Ok(Err(format!("j = {j}: constructive generator is invalid")))
            }
            Ok(_) | Err(Error::TorsionUnavailable { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Ok(()))
}

/// Representatives of every class usable for direct computation on this isogeny class.
fn direct_reps(g: &GenClassGroup, sample: &OrientedCurve) -> Result<Vec<QuadIdeal>> {
    g.representatives_where(|a| is_actionable(sample, a))
}

/// A second representative per class, `r_a · r_{a⁻¹c}` for a fixed non-identity `a`.
fn second_reps(g: &GenClassGroup, reps: &[QuadIdeal]) -> Result<Vec<QuadIdeal>> {
    let a = (0..g.len()).find(|&c| c != g.identity).unwrap_or(g.identity);
    let ainv = g.inverse(a);
    (0..g.len()).map(|c| reps[a].mul(&g.order, &reps[g.mul(ainv, c)])).collect()
}

/// Full certification of the action of `engine.group` on `engine.set`.
pub fn certify_engine(label: &str, engine: &ActionEngine, seed: u64) -> Certificate {
    let started = Instant::now();
    let space = &engine.space;
    let g = &engine.group;
    let set = &engine.set;
    let q = set.first().map_or(0, |x| x.oc.curve.p());
    let mut cert = Certificate::new(scenario_of(label, space, q), seed);
    cert.group_order = g.len();
    cert.set_size = set.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = set.len();

    cert.record_with("level_structures", || {
        for (i, x) in set.iter().enumerate() {
            if !space.is_level_structure(x)? {
                return Ok(Err(format!("element {i} is not an m-level structure")));
            }
            if space.flavor == crate::oriented::Flavor::Z && !space.is_module_map(x)? {
                return Ok(Err(format!("element {i} is not an O-module map")));
            }
        }
        Ok(Ok(()))
    });
    cert.record_with("module_generators", || module_generator_check(space, set));
    cert.record("generator_closure", {
        let bad = engine
            .transitions
            .iter()
            .enumerate()
            .find_map(|(k, row)| row.iter().position(|t| t.is_none()).map(|x| (k, x)));
        match bad {
            None => Ok(()),
            Some((k, x)) => Err(format!("generator {:?} sends element {x} outside the set", engine.generators[k].0)),
        }
    });

    let sample = set.first().map(|x| x.oc.clone());
    let reps = sample.as_ref().map(|s| direct_reps(g, s));
    let reps = match reps {
        Some(Ok(r)) => Some(r),
        Some(Err(e)) => {
            cert.record("representatives", Err(format!("error: {e}")));
            None
        }
        None => None,
    };
    if let (Some(reps), Some(sample)) = (&reps, &sample) {
        let seconds = second_reps(g, reps);
        cert.record_with("identity", || {
            let second = seconds.as_ref().map_err(|e| Error::Budget(e.to_string()))?;
            for k in 0..n.min(8) {
                let x = &set[(k * 7919) % n];
                for a in [&reps[g.identity], &second[g.identity]] {
                    if space.act(a, x)? != *x {
                        return Ok(Err(format!("{a:?} (identity class) moves an element")));
                    }
                }
            }
            Ok(Ok(()))
        });
        cert.record_with("representative_independence", || {
            let second = seconds.as_ref().map_err(|e| Error::Budget(e.to_string()))?;
            for _ in 0..6 {
                let (c, i) = (rng.gen_range(0..g.len()), rng.gen_range(0..n));
                let a = space.act(&reps[c], &set[i])?;
                let b = space.act(&second[c], &set[i])?;
                if a != b || engine.position(&a) != engine.act_index(c, i) {
                    return Ok(Err(format!("class {c}: {:?} and {:?} disagree on element {i}", reps[c], second[c])));
                }
            }
            Ok(Ok(()))
        });
        cert.record_with("compatibility", || {
            for _ in 0..6 {
                let (a, b, i) = (rng.gen_range(0..g.len()), rng.gen_range(0..g.len()), rng.gen_range(0..n));
                let inner = space.act(&reps[b], &set[i])?;
                let lhs = space.act(&reps[a], &inner)?;
                let rhs = space.act(&reps[g.mul(a, b)], &set[i])?;
                if lhs != rhs {
                    return Ok(Err(format!("([{a}][{b}]) ⋆ x{i} ≠ [{a}] ⋆ ([{b}] ⋆ x{i})")));
                }
            }
            Ok(Ok(()))
        });
        cert.record_with("principal_compatibility", || {
            let o = &space.order;
            let mut tried = 0;
            for x in 1..60i64 {
                for y in 1..4i64 {
                    if tried == 4 {
                        return Ok(Ok(()));
                    }
                    let alpha = Elem::new(x, y);
                    let a = QuadIdeal::from_generators(o, &[alpha])?;
                    if a.check(o).is_err() || !a.is_coprime_to(o, &space.modulus.ideal) || !is_actionable(sample, &a) {
                        continue;
                    }
                    tried += 1;
                    let i = rng.gen_range(0..n);
                    if space.act(&a, &set[i])? != space.precompose_mult(&set[i], alpha)? {
                        return Ok(Err(format!("α = {alpha:?}: φ_a ∘ Φ ≠ Φ ∘ μ_α on element {i}")));
                    }
                }
            }
            Ok(Ok(()))
        });
    }

    cert.record("freeness", {
        let mut bad = None;
        'outer: for c in (0..g.len()).filter(|&c| c != g.identity) {
            for i in 0..n {
                if engine.act_index(c, i) == Some(i) {
                    bad = Some(format!("class {c} fixes element {i}"));
                    break 'outer;
                }
            }
        }
        bad.map_or(Ok(()), Err)
    });
    cert.record("transitivity", {
        if n == 0 {
            Err("empty set".into())
        } else {
            let orbit: BTreeSet<Option<usize>> = (0..g.len()).map(|c| engine.act_index(c, 0)).collect();
            if orbit.len() == n && !orbit.contains(&None) {
                Ok(())
            } else {
                Err(format!("orbit of element 0 has {} of {n} elements", orbit.iter().flatten().count()))
            }
        }
    });
    cert.finish(started);
    cert
}

/// Enumerates, builds the action tables and certifies in one go.
pub fn certify_action(
    label: &str,
    space: LevelSpace,
    group: GenClassGroup,
    curves: &[OrientedCurve],
    seed: u64,
) -> Result<(Certificate, ActionEngine)> {
    let set = space.enumerate(curves)?;
    let engine = ActionEngine::build(space, group, set, false)?;
    let cert = certify_engine(label, &engine, seed);
    Ok((cert, engine))
}
