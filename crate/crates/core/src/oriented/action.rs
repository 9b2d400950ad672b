//! The action `a ⋆ (E, ι)` of invertible ideals on oriented curves, via chains of
//! prime-degree isogenies.

use super::kernel::{prime_kernel, prime_kernel_level};
use super::orientation::OrientedCurve;
use crate::arith::gcd_u;
use crate::curvefield::{velu, Point};
use crate::error::{Error, Result};
use crate::quadforms::QuadIdeal;

/// The oriented curve with its curve replaced by the canonical member of its
/// `F_q`-isomorphism class, and the scaling `u` taking points across.
pub fn canonical_oriented(oc: &OrientedCurve) -> Result<(OrientedCurve, u64)> {
    let (c, u) = oc.curve.canonical();
    if c == oc.curve {
        return Ok((oc.clone(), 1));
    }
    Ok((oc.transport(c)?, u))
}

/// One step along a prime ideal; inert primes `ℓO` act as `[ℓ]`.
pub fn prime_step(oc: &OrientedCurve, p: &QuadIdeal, pts: &[Point]) -> Result<(OrientedCurve, Vec<Point>)> {
    let e = &oc.curve;
    if p.c > 1 {
        let l = p.c as i128;
        return Ok((oc.clone(), pts.iter().map(|x| e.mul(l, x)).collect()));
    }
    let g = prime_kernel(oc, p)?;
    let phi = velu(e, &[g])?;
    let (c, u) = phi.codomain.canonical();
    let phi = phi.then_scale(u);
    debug_assert_eq!(phi.codomain, c);
    let next = oc.transport(c)?;
    Ok((next, pts.iter().map(|x| phi.eval(x)).collect()))
}

/// Applies `a` to `(E, ι)` and pushes `pts` along the isogeny `φ_a`.
pub fn act_with_points(oc: &OrientedCurve, a: &QuadIdeal, pts: &[Point]) -> Result<(OrientedCurve, Vec<Point>)> {
    a.check(&oc.order)?;
    if gcd_u(a.norm() as u64, oc.curve.p()) != 1 {
        return Err(Error::Precondition(format!("N({a:?}) is divisible by the characteristic")));
    }
    let (mut cur, u) = canonical_oriented(oc)?;
    let mut pts: Vec<Point> = pts.iter().map(|x| oc.curve.scale_point(u, x)).collect();
    for p in a.prime_factors(&oc.order)? {
        let (next, moved) = prime_step(&cur, &p, &pts)?;
        cur = next;
        pts = moved;
    }
    Ok((cur, pts))
}

/// Whether every prime step of `a` has its kernel over some level `≤ 6`.
/// Depends only on the orientation, not on the curve.
pub fn is_actionable(oc: &OrientedCurve, a: &QuadIdeal) -> bool {
    if a.check(&oc.order).is_err() || gcd_u(a.norm() as u64, oc.curve.p()) != 1 {
        return false;
    }
    match a.prime_factors(&oc.order) {
        Ok(ps) => ps.iter().all(|p| p.c > 1 || prime_kernel_level(oc, p).is_some()),
        Err(_) => false,
    }
}

/// `a ⋆ (E, ι)`, returned in canonical form.
pub fn act_on_curve(oc: &OrientedCurve, a: &QuadIdeal) -> Result<OrientedCurve> {
    Ok(act_with_points(oc, a, &[])?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvefield::supersingular_floor_set;
    use crate::quadforms::{order_from_disc, splitting_type, Elem, SplitType};
    use std::collections::BTreeSet;

    fn floor(p: u64) -> Vec<OrientedCurve> {
        supersingular_floor_set(p)
            .unwrap()
            .into_iter()
            .map(|e| OrientedCurve::from_frobenius(e, -4 * p as i64).unwrap())
            .collect()
    }

    #[test]
    fn prime_above_three_is_a_three_cycle() {
        let curves = floor(11);
        let o = order_from_disc(-44).unwrap();
        let SplitType::Split(p, pbar) = splitting_type(&o, 3).unwrap() else { panic!() };
        let start = curves[0].clone();
        let mut orbit = vec![start.clone()];
        let mut cur = start.clone();
        for _ in 0..3 {
            cur = act_on_curve(&cur, &p).unwrap();
            orbit.push(cur.clone());
        }
        assert_eq!(orbit[3], start);
        let distinct: BTreeSet<(u64, u64)> = orbit[..3].iter().map(|c| (c.curve.a, c.curve.b)).collect();
        assert_eq!(distinct.len(), 3);
        let all: BTreeSet<(u64, u64)> = curves.iter().map(|c| (c.curve.a, c.curve.b)).collect();
        assert_eq!(distinct, all);
        // p then p̄ returns to the start
        let back = act_on_curve(&act_on_curve(&start, &p).unwrap(), &pbar).unwrap();
        assert_eq!(back, start);
    }

    #[test]
    fn principal_ideals_act_trivially() {
        let curves = floor(23);
        let o = order_from_disc(-92).unwrap();
        for alpha in [Elem::new(2, 1), Elem::new(3, 0), Elem::new(4, 1), Elem::new(5, 2)] {
            let a = QuadIdeal::from_generators(&o, &[alpha]).unwrap();
            for oc in &curves {
                assert_eq!(act_on_curve(oc, &a).unwrap(), *oc, "α = {alpha:?}");
            }
        }
    }
}
