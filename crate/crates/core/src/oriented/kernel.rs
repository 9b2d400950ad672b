//! Ideal kernels `E[a]`, the torsion `E[m]` as an `O`-module, and descending kernels.

use std::collections::BTreeSet;

use rand::Rng;

use super::orientation::OrientedCurve;
use crate::arith::{gcd_u, inv_mod, mult_order};
use crate::curvefield::{dlog_2d, subgroup, torsion_basis, torsion_level, velu, weil_pairing, Point, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::quadforms::QuadIdeal;

fn check_ideal(oc: &OrientedCurve, a: &QuadIdeal) -> Result<()> {
    a.check(&oc.order)?;
    if gcd_u(a.norm() as u64, oc.curve.p()) != 1 {
        return Err(Error::Precondition(format!("N({a:?}) is divisible by the characteristic")));
    }
    Ok(())
}

fn is_degree_one_prime(a: &QuadIdeal) -> bool {
    a.c == 1 && crate::arith::is_prime(a.a as u64)
}

/// Field level over which the eigenspace `ker(b + σ)` of a degree-one prime `(ℓ, b + ω)` is rational.
pub fn prime_kernel_level(oc: &OrientedCurve, p: &QuadIdeal) -> Option<u8> {
    let l = p.a as i128;
    let lambda = (-p.b as i128).rem_euclid(l);
    let o = &oc.orientation;
    let vinv = inv_mod(o.v as i128, l)?;
    let mu = ((o.w as i128 * lambda - o.u as i128) * vinv).rem_euclid(l);
    let k = mult_order(mu as u64, l as u64)?;
    (k as usize <= MAX_LEVEL).then_some(k as u8)
}

/// Generator of `E[p]` for a degree-one prime `p = (ℓ, b + ω)`: the `−b`-eigenspace of `σ` on `E[ℓ]`.
pub fn prime_kernel(oc: &OrientedCurve, p: &QuadIdeal) -> Result<Point> {
    check_ideal(oc, p)?;
    if !is_degree_one_prime(p) {
        return Err(Error::Domain(format!("{p:?} is not a prime ideal of degree one")));
    }
    let e = &oc.curve;
    let l = p.a;
    let lambda = (-p.b).rem_euclid(l);
    let other = (oc.order.omega_trace - lambda).rem_euclid(l);
    let levels: Vec<u8> = match prime_kernel_level(oc, p) {
        Some(k) => vec![k],
        None => (1..=MAX_LEVEL as u8).collect(),
    };
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(e.p() ^ ((l as u64) << 20) ^ e.a);
    for level in levels {
        let n = e.order(level);
        let mut v = 0;
        let mut cof = n;
        while cof % l as u128 == 0 {
            cof /= l as u128;
            v += 1;
        }
        if v == 0 {
            continue;
        }
        for _ in 0..200 {
            let mut y = e.mul(cof as i128, &e.random_point(level, &mut rng));
            if y.inf {
                continue;
            }
            while !e.mul(l as i128, &y).inf {
                y = e.mul(l as i128, &y);
            }
            let in_eigenspace = |pt: &Point| -> Result<bool> { Ok(oc.sigma(pt)? == e.mul(lambda as i128, pt)) };
            if in_eigenspace(&y)? {
                return Ok(y);
            }
            let z = e.sub(&oc.sigma(&y)?, &e.mul(other as i128, &y));
            if !z.inf && in_eigenspace(&z)? {
                return Ok(z);
            }
        }
    }
    Err(Error::TorsionUnavailable { n: l as u64, level: MAX_LEVEL as u8, minimal: "none up to 6".into() })
}

/// Coordinates of the subgroup `{(x, y) : (b + cM)(x, y) ≡ 0 (mod n)}`.
fn kernel_coords(n: i64, b: i64, c: i64, m: [[i64; 2]; 2]) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let r0 = (b * x + c * (m[0][0] * x + m[0][1] * y)).rem_euclid(n);
            let r1 = (b * y + c * (m[1][0] * x + m[1][1] * y)).rem_euclid(n);
            if r0 == 0 && r1 == 0 {
                out.push((x, y));
            }
        }
    }
    out
}

/// Few coordinate vectors generating the given subgroup of `(Z/n)²`.
fn coord_generators(n: i64, elems: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut gens = Vec::new();
    let mut span: BTreeSet<(i64, i64)> = BTreeSet::from([(0, 0)]);
    for &g in elems {
        if span.contains(&g) {
            continue;
        }
        gens.push(g);
        let mut frontier: Vec<(i64, i64)> = span.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for h in &gens {
                let y = ((x.0 + h.0) % n, (x.1 + h.1) % n);
                if span.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// Generators of `E[a] = E[n] ∩ ker ι(b + cω)` over the given level, by linear algebra on a basis of `E[n]`.
pub fn ideal_kernel_at(oc: &OrientedCurve, a: &QuadIdeal, level: u8) -> Result<Vec<Point>> {
    check_ideal(oc, a)?;
    if a.norm() == 1 {
        return Ok(vec![Point::INFINITY]);
    }
    let e = &oc.curve;
    let n = a.a;
    let (b1, b2) = torsion_basis(e, n as u64, level)?;
    let s1 = dlog_2d(e, &oc.sigma(&b1)?, &b1, &b2, n as u64)?;
    let s2 = dlog_2d(e, &oc.sigma(&b2)?, &b1, &b2, n as u64)?;
    let m = [[s1.0 as i64, s2.0 as i64], [s1.1 as i64, s2.1 as i64]];
    let coords = kernel_coords(n, a.b, a.c, m);
    if coords.len() as i64 != a.norm() {
        return Err(Error::Consistency(format!("E[a] has {} points but N(a) = {}", coords.len(), a.norm())));
    }
    Ok(coord_generators(n, &coords).into_iter().map(|(x, y)| e.lin(x as i128, &b1, y as i128, &b2)).collect())
}

/// Smallest level over which all of `E[a]` is rational (via `E[n]`, `n` the integer generator).
pub fn ideal_kernel_level(oc: &OrientedCurve, a: &QuadIdeal) -> Result<u8> {
    if is_degree_one_prime(a) {
        if let Some(k) = prime_kernel_level(oc, a) {
            return Ok(k);
        }
    }
    torsion_level(&oc.curve, a.a as u64).ok_or(Error::TorsionUnavailable {
        n: a.a as u64,
        level: MAX_LEVEL as u8,
        minimal: "none up to 6".into(),
    })
}

/// Generators of the ideal kernel `E[a]`.
pub fn ideal_kernel(oc: &OrientedCurve, a: &QuadIdeal) -> Result<Vec<Point>> {
    check_ideal(oc, a)?;
    if a.norm() == 1 {
        return Ok(vec![Point::INFINITY]);
    }
    if is_degree_one_prime(a) {
        return Ok(vec![prime_kernel(oc, a)?]);
    }
    let level = torsion_level(&oc.curve, a.a as u64).ok_or(Error::TorsionUnavailable {
        n: a.a as u64,
        level: MAX_LEVEL as u8,
        minimal: "none up to 6".into(),
    })?;
    ideal_kernel_at(oc, a, level)
}

/// All points of `E[m]` over the given level.
pub fn ideal_torsion(oc: &OrientedCurve, m: &QuadIdeal, level: u8) -> Result<Vec<Point>> {
    subgroup(&oc.curve, &ideal_kernel_at(oc, m, level)?)
}

/// Whether `1 ↦ P` induces an isomorphism `O/m → E[m]`, i.e. `⟨P, σP⟩` has `N(m)` points.
pub fn is_module_generator(oc: &OrientedCurve, norm: i64, pt: &Point) -> Result<bool> {
    Ok(subgroup(&oc.curve, &[*pt, oc.sigma(pt)?])?.len() as i64 == norm)
}

/// A point `P` with `E[m] = ⟨P, σP⟩`, found by sampling `E[m]`.
pub fn module_generator<R: Rng + ?Sized>(oc: &OrientedCurve, m: &QuadIdeal, level: u8, rng: &mut R) -> Result<Point> {
    let pts = ideal_torsion(oc, m, level)?;
    for _ in 0..500 {
        let cand = pts[rng.gen_range(0..pts.len())];
        if is_module_generator(oc, m.norm(), &cand)? {
            return Ok(cand);
        }
    }
    Err(Error::Budget(format!("no module generator of E[{m:?}] after 500 samples")))
}

/// Module generator built by pulling a generator of `E_m[N(m)]` back along the dual of
/// `φ_m: E → E_m = E/E[m]`. Returns the point over the level where `E[N(m)]` lives.
pub fn module_generator_constructive(oc: &OrientedCurve, m: &QuadIdeal) -> Result<Point> {
    check_ideal(oc, m)?;
    let e = &oc.curve;
    let n = m.norm() as u64;
    if n == 1 {
        return Ok(Point::INFINITY);
    }
    let level = torsion_level(e, n).ok_or(Error::TorsionUnavailable { n, level: 6, minimal: "none up to 6".into() })?;
    let phi = velu(e, &ideal_kernel(oc, m)?)?;
    let em = oc.transport(phi.codomain.clone())?;
    let (b1, b2) = torsion_basis(&em.curve, n, level)?;
    let f = em.curve.field(level);
    let mut gen = None;
    'scan: for x in 0..n {
        for y in 0..n {
            let pt = em.curve.lin(x as i128, &b1, y as i128, &b2);
            if pt.inf {
                continue;
            }
            let z = weil_pairing(&em.curve, &pt, &em.sigma(&pt)?, n)?;
            if f.order_dividing(z, n as u128) == n as u128 {
                gen = Some(pt);
                break 'scan;
            }
        }
    }
    let gen = gen.ok_or_else(|| Error::Consistency("E_m[N(m)] has no O-module generator".into()))?;
    Ok(phi.dual()?.eval(&gen))
}

/// Generators of the order-`f` subgroups of `E[f]` that are not `σ`-eigenspaces.
pub fn descending_kernels(oc: &OrientedCurve, f: u64) -> Result<Vec<Point>> {
    if !crate::arith::is_prime(f) || f == oc.curve.p() || oc.order.cond % f as i64 == 0 {
        return Err(Error::Precondition(format!("f = {f} must be a prime coprime to q and to the conductor")));
    }
    let e = &oc.curve;
    let level =
        torsion_level(e, f).ok_or(Error::TorsionUnavailable { n: f, level: 6, minimal: "none up to 6".into() })?;
    let (p, q) = torsion_basis(e, f, level)?;
    let mut out = Vec::new();
    let lines = (0..f).map(|c| e.add(&p, &e.mul(c as i128, &q))).chain(std::iter::once(q));
    for g in lines {
        let s = oc.sigma(&g)?;
        let eigen = (0..f).any(|k| e.mul(k as i128, &g) == s);
        if !eigen {
            out.push(g);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvefield::{supersingular_floor_set, Curve, Tower};
    use crate::quadforms::{order_from_disc, splitting_type, SplitType};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn floor11() -> OrientedCurve {
        let e = supersingular_floor_set(11).unwrap().remove(0);
        OrientedCurve::from_frobenius(e, -44).unwrap()
    }

    #[test]
    fn kernels_on_floor() {
        let oc = floor11();
        let o = order_from_disc(-44).unwrap();
        assert_eq!(ideal_kernel(&oc, &QuadIdeal::unit(&o)).unwrap(), vec![Point::INFINITY]);
        let full = ideal_torsion(&oc, &QuadIdeal::integer(&o, 3), 2).unwrap();
        assert_eq!(full.len(), 9);
        let SplitType::Split(p, pbar) = splitting_type(&o, 3).unwrap() else { panic!() };
        for pr in [p, pbar] {
            let g = prime_kernel(&oc, &pr).unwrap();
            assert_eq!(oc.curve.point_order(&g), 3);
            // oracle: the eigenspace by enumeration of E[3]
            let lambda = (-pr.b).rem_euclid(3);
            let eigen: Vec<Point> =
                full.iter().copied().filter(|pt| oc.sigma(pt).unwrap() == oc.curve.mul(lambda as i128, pt)).collect();
            assert_eq!(eigen.len(), 3);
            assert!(eigen.contains(&g));
            let generic = ideal_torsion(&oc, &pr, 2).unwrap();
            assert_eq!(generic.len(), 3);
            assert!(generic.iter().all(|x| eigen.contains(x)));
        }
    }

    #[test]
    fn module_generators_counted() {
        let oc = floor11();
        let o = order_from_disc(-44).unwrap();
        let m = QuadIdeal::integer(&o, 3);
        let pts = ideal_torsion(&oc, &m, 2).unwrap();
        let count = pts.iter().filter(|p| is_module_generator(&oc, 9, p).unwrap()).count();
        assert_eq!(count, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = module_generator(&oc, &m, 2, &mut rng).unwrap();
        let z = weil_pairing(&oc.curve, &g, &oc.sigma(&g).unwrap(), 3).unwrap();
        assert_ne!(z, oc.curve.field(2).one());
        let c = module_generator_constructive(&oc, &m).unwrap();
        assert!(is_module_generator(&oc, 9, &c).unwrap());
        assert!(oc.curve.mul(3, &c).inf);
    }

    #[test]
    fn descending_on_gaussian_surface() {
        let t = Tower::new(13).unwrap();
        let e = (1..13).map(|c| Curve::new(&t, c, 0).unwrap()).find(|e| e.trace() == 4).unwrap();
        let oc = OrientedCurve::from_frobenius(e, -4).unwrap();
        let ks = descending_kernels(&oc, 3).unwrap();
        assert_eq!(ks.len(), 4);
        for g in ks {
            let phi = velu(&oc.curve, &[g]).unwrap();
            let tr = phi.codomain.trace();
            assert_eq!(tr, 4);
            // the codomain is not j = 1728, so End is Z[3i] (disc −36)
            assert_ne!(phi.codomain.j_invariant(), 1728 % 13);
            assert!(OrientedCurve::from_frobenius(phi.codomain.clone(), -36).is_ok());
        }
        let oc11 = floor11();
        // 3 splits in Z[√−11]: two eigenspaces removed
        assert_eq!(descending_kernels(&oc11, 3).unwrap().len(), 2);
        assert_eq!(descending_kernels(&oc11, 5).unwrap().len(), 4);
    }
}
