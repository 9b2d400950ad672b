//! Given `x1, x2` in one orbit, recover the class `[a]` with `[a] ⋆ x1 = x2`.

use super::engine::ActionEngine;
use crate::arith::gcd;
use crate::congruence::UnitGroup;
use crate::curvefield::{dlog_2d, dlog_points};
use crate::error::{Error, Result};
use crate::oriented::LevelledCurve;
use crate::quadforms::{Elem, QuadIdeal};

/// `β` with `Φ_2 = Φ_1 ∘ μ_β` for two `O`-module structures on one curve.
fn scalar_stage(engine: &ActionEngine, y: &LevelledCurve, x2: &LevelledCurve) -> Result<Elem> {
    let space = &engine.space;
    let m = &space.modulus;
    let o = &space.order;
    let e = &y.oc.curve;
    let (one_x, one_y) = m.coords(Elem::int(1));
    let r1 = e.lin(one_x as i128, &y.p, one_y as i128, &y.q);
    let r2 = e.lin(one_x as i128, &x2.p, one_y as i128, &x2.q);
    if m.b_m == 1 {
        let k = dlog_points(e, &r1, &r2, m.a_m as u128)
            .ok_or_else(|| Error::NoSolution("no scalar relates the level structures".into()))?;
        return Ok(Elem::int(k as i64));
    }
    if m.b_m == m.a_m {
        let (a, b) = dlog_2d(e, &r2, &r1, &y.oc.sigma(&r1)?, m.a_m as u64)?;
        return Ok(Elem::new(a as i64, b as i64));
    }
    for u in UnitGroup::new(o, m).elems {
        if y.oc.apply(u, &r1)? == r2 {
            return Ok(u);
        }
    }
    Err(Error::NoSolution("no unit relates the level structures".into()))
}

/// An element `α ≡ β (mod m)` with `αO` proper and coprime to `m`.
fn lift(engine: &ActionEngine, beta: Elem) -> Result<QuadIdeal> {
    let o = &engine.space.order;
    let m = &engine.space.modulus;
    let n = m.norm;
    for k in 0..200i64 {
        for shift in [Elem::new(k * n, 0), Elem::new(0, k * n), Elem::new(k * n, k * n)] {
            let alpha = Elem::new(beta.x + shift.x, beta.y + shift.y);
            let norm = o.norm(alpha);
            if norm == 0 || gcd((norm % o.cond as i128) as i64, o.cond) != 1 {
                continue;
            }
            let a = QuadIdeal::from_generators(o, &[alpha])?;
            if a.check(o).is_ok() && a.is_coprime_to(o, &m.ideal) {
                return Ok(a);
            }
        }
    }
    Err(Error::NoSolution(format!("no proper lift of {beta:?} modulo m")))
}

/// Two stages: walk the `Cl_O` part over curve orbits, then read the residual unit
/// off a Weil-pairing discrete logarithm. The answer is verified by re-acting.
pub fn vectorize(engine: &ActionEngine, x1: &LevelledCurve, x2: &LevelledCurve) -> Result<usize> {
    let g = &engine.group;
    if engine.position(x1).is_none() || engine.position(x2).is_none() {
        return Err(Error::NoSolution("input outside the enumerated set".into()));
    }
    let mut lifts: Vec<Option<usize>> = vec![None; g.base_classes.len()];
    for c in 0..g.len() {
        lifts[g.base_class(c)].get_or_insert(c);
    }
    let c = lifts
        .into_iter()
        .flatten()
        .find(|&c| engine.act(c, x1).is_ok_and(|y| y.oc.curve == x2.oc.curve))
        .ok_or_else(|| Error::NoSolution("target curve lies outside the orbit".into()))?;
    let y = engine.act(c, x1)?;
    let beta = scalar_stage(engine, &y, x2)?;
    let a = lift(engine, beta)?;
    let answer = g.mul(g.class_index(&a)?, c);
    if engine.act(answer, x1)? != *x2 {
        return Err(Error::NoSolution("recovered class does not reproduce the target".into()));
    }
    Ok(answer)
}
