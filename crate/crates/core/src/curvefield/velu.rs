//! Separable isogenies from explicit finite kernels (Vélu's formulas).
//!
//! The map is stored in descended form `X = x + T(x)/h(x)²`, `Y = y·X'(x)` with
//! `h = ∏(x − x_Q)` over the kernel modulo `±1`. For Galois-stable kernels both
//! polynomials have `F_q` coefficients, so the map evaluates on points of any level.

use std::collections::BTreeSet;

use super::curve::{join_level, Curve, Point};
use super::field::{Fe, Field};
use super::pairing::{torsion_basis, torsion_level};
use crate::arith::gcd_u;
use crate::error::{Error, Result};

pub const MAX_KERNEL: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Isogeny {
    pub domain: Curve,
    pub codomain: Curve,
    pub degree: u64,
    pub kernel: Vec<Point>,
    t_poly: Vec<u64>,
    h_poly: Vec<u64>,
    /// Post-composition `(x, y) ↦ (s2·x, s3·y)`.
    s2: u64,
    s3: u64,
}

/// The subgroup generated by `gens`, listed explicitly.
pub fn subgroup(e: &Curve, gens: &[Point]) -> Result<Vec<Point>> {
    let mut set: BTreeSet<Point> = BTreeSet::new();
    set.insert(Point::INFINITY);
    let mut frontier = vec![Point::INFINITY];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = e.add(&x, g);
            if set.insert(y) {
                if set.len() > MAX_KERNEL {
                    return Err(Error::BadKernel(format!("subgroup exceeds {MAX_KERNEL} points")));
                }
                frontier.push(y);
            }
        }
    }
    Ok(set.into_iter().collect())
}

fn poly_mul(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(*x, *y));
        }
    }
    out
}

fn poly_add(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = *x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = f.add(out[i], *y);
    }
    out
}

fn descend(coeffs: &[Fe]) -> Result<Vec<u64>> {
    coeffs
        .iter()
        .map(|c| c.constant_value())
        .collect::<Option<Vec<u64>>>()
        .ok_or_else(|| Error::BadKernel("kernel is not Galois-stable, so the isogeny is not defined over F_q".into()))
}

fn eval_poly(f: &Field, coeffs: &[u64], x: Fe) -> Fe {
    coeffs.iter().rev().fold(Fe::ZERO, |acc, c| f.add(f.mul(acc, x), Fe::constant(*c)))
}

fn derivative(coeffs: &[u64], p: u64) -> Vec<u64> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % p) * c % p).collect()
}

/// Vélu isogeny with kernel generated by `gens`.
pub fn velu(e: &Curve, gens: &[Point]) -> Result<Isogeny> {
    for g in gens {
        if !e.contains(g) {
            return Err(Error::BadKernel(format!("{g:?} is not on the curve")));
        }
    }
    let level = gens.iter().fold(1u8, |l, g| join_level(l, g.level));
    let kernel = subgroup(e, gens)?;
    let degree = kernel.len() as u64;
    if gcd_u(degree, e.p()) != 1 {
        return Err(Error::BadKernel(format!("kernel order {degree} is divisible by the characteristic")));
    }
    let f = e.field(level);
    let a = Fe::constant(e.a);
    let mut reps: Vec<(Fe, Fe, Fe)> = Vec::new(); // (x_Q, v_Q, u_Q)
    let mut taken: BTreeSet<Point> = BTreeSet::new();
    let (mut v, mut w) = (Fe::ZERO, Fe::ZERO);
    for q in kernel.iter().filter(|q| !q.inf) {
        if taken.contains(q) {
            continue;
        }
        taken.insert(*q);
        taken.insert(e.neg(q));
        let gx = f.add(f.scale(3, f.sqr(q.x)), a);
        let two_torsion = q.y.is_zero();
        let vq = if two_torsion { gx } else { f.scale(2, gx) };
        let uq = f.scale(4, f.sqr(q.y));
        v = f.add(v, vq);
        w = f.add(w, f.add(uq, f.mul(q.x, vq)));
        reps.push((q.x, vq, uq));
    }
    let a2 = f.sub(a, f.scale(5, v));
    let b2 = f.sub(Fe::constant(e.b), f.scale(7, w));
    let (a2, b2) = match (a2.constant_value(), b2.constant_value()) {
        (Some(a2), Some(b2)) => (a2, b2),
        _ => return Err(Error::BadKernel("codomain is not defined over F_q".into())),
    };
    let lin = |xq: Fe| vec![f.neg(xq), f.one()];
    let mut h = vec![f.one()];
    for (xq, _, _) in &reps {
        h = poly_mul(f, &h, &lin(*xq));
    }
    let mut t = vec![Fe::ZERO];
    for (i, (xq, vq, uq)) in reps.iter().enumerate() {
        let mut hq = vec![f.one()];
        for (j, (xj, _, _)) in reps.iter().enumerate() {
            if i != j {
                hq = poly_mul(f, &hq, &lin(*xj));
            }
        }
        let term = poly_add(f, &poly_mul(f, &lin(*xq), &[*vq]), &[*uq]);
        t = poly_add(f, &t, &poly_mul(f, &term, &poly_mul(f, &hq, &hq)));
    }
    let codomain = Curve::new(&e.tower, a2 as i64, b2 as i64)
        .map_err(|_| Error::Consistency("Vélu codomain is singular".into()))?;
    Ok(Isogeny {
        domain: e.clone(),
        codomain,
        degree,
        kernel,
        t_poly: descend(&t)?,
        h_poly: descend(&h)?,
        s2: 1,
        s3: 1,
    })
}

impl Isogeny {
    pub fn eval(&self, pt: &Point) -> Point {
        if pt.inf {
            return *pt;
        }
        let p = self.domain.p();
        let f = self.domain.field(pt.level);
        let x = pt.x;
        let h = eval_poly(f, &self.h_poly, x);
        if h.is_zero() {
            return Point::INFINITY;
        }
        let t = eval_poly(f, &self.t_poly, x);
        let dt = eval_poly(f, &derivative(&self.t_poly, p), x);
        let dh = eval_poly(f, &derivative(&self.h_poly, p), x);
        let hinv = f.inv(h).expect("nonzero");
        let hinv2 = f.sqr(hinv);
        let xx = f.add(x, f.mul(t, hinv2));
        // X' = 1 + (T'h − 2Th')/h³
        let num = f.sub(f.mul(dt, h), f.scale(2, f.mul(t, dh)));
        let dx = f.add(f.one(), f.mul(num, f.mul(hinv2, hinv)));
        let yy = f.mul(pt.y, dx);
        Point::affine(f.mul(Fe::constant(self.s2), xx), f.mul(Fe::constant(self.s3), yy), pt.level)
    }

    /// Post-composes with `(x, y) ↦ (u²x, u³y)`.
    pub fn then_scale(mut self, u: u64) -> Isogeny {
        let p = self.domain.p() as u128;
        let u = u as u128 % p;
        self.s2 = (self.s2 as u128 * u % p * u % p) as u64;
        self.s3 = (self.s3 as u128 * u % p * u % p * u % p) as u64;
        self.codomain = self.codomain.scaled(u as u64);
        self
    }

    /// The dual isogeny, built as Vélu on `φ(E[n])` followed by `(x, y) ↦ (x/n², y/n³)`.
    pub fn dual(&self) -> Result<Isogeny> {
        let n = self.degree;
        let e = &self.domain;
        let level = torsion_level(e, n).ok_or(Error::TorsionUnavailable {
            n,
            level: super::MAX_LEVEL as u8,
            minimal: "none up to 6".into(),
        })?;
        let (p, q) = torsion_basis(e, n, level)?;
        let psi = velu(&self.codomain, &[self.eval(&p), self.eval(&q)])?;
        let pr = e.p();
        let ninv = crate::arith::pow_mod(n % pr, pr - 2, pr);
        let out = psi.then_scale(ninv);
        if out.codomain != *e {
            return Err(Error::Consistency("dual isogeny does not return to the domain".into()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvefield::Tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_hom(phi: &Isogeny, level: u8, rng: &mut ChaCha8Rng) {
        for _ in 0..10 {
            let p = phi.domain.random_point(level, rng);
            let q = phi.domain.random_point(level, rng);
            let (fp, fq) = (phi.eval(&p), phi.eval(&q));
            assert!(phi.codomain.contains(&fp));
            assert_eq!(phi.eval(&phi.domain.add(&p, &q)), phi.codomain.add(&fp, &fq));
        }
        for k in &phi.kernel {
            assert!(phi.eval(k).inf);
        }
    }

    #[test]
    fn identity_kernel() {
        let t = Tower::new(11).unwrap();
        let e = Curve::new(&t, 1, 0).unwrap();
        let phi = velu(&e, &[Point::INFINITY]).unwrap();
        assert_eq!(phi.codomain, e);
        assert_eq!(phi.degree, 1);
    }

    #[test]
    fn two_isogeny_dual() {
        let t = Tower::new(11).unwrap();
        let e = Curve::new(&t, 1, 0).unwrap();
        let k = e.rational_two_torsion()[0];
        let phi = velu(&e, &[k]).unwrap();
        assert_eq!(phi.degree, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        check_hom(&phi, 2, &mut rng);
        let dual = phi.dual().unwrap();
        for _ in 0..100 {
            let p = e.random_point(2, &mut rng);
            assert_eq!(dual.eval(&phi.eval(&p)), e.mul(2, &p));
        }
    }

    #[test]
    fn degree_three_on_floor() {
        let t = Tower::new(11).unwrap();
        let e = Curve::new(&t, 1, 0).unwrap();
        let g = e.mul(4, &e.all_points(1).unwrap().into_iter().find(|p| e.point_order(p) == 12).unwrap());
        let phi = velu(&e, &[g]).unwrap();
        assert_eq!(phi.degree, 3);
        assert_eq!(phi.codomain.order(1), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        check_hom(&phi, 1, &mut rng);
        check_hom(&phi, 3, &mut rng);
        let dual = phi.dual().unwrap();
        for _ in 0..100 {
            let p = e.random_point(2, &mut rng);
            assert_eq!(dual.eval(&phi.eval(&p)), e.mul(3, &p));
        }
    }

    /// A rational isogeny whose kernel points are irrational: kernel of a 5-isogeny on
    /// a curve over F_13 where the generator lives in an extension.
    #[test]
    fn irrational_kernel_descends() {
        let t = Tower::new(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut found = false;
        'search: for a in 1..13 {
            for b in 1..13 {
                let Ok(e) = Curve::new(&t, a, b) else { continue };
                let Some(lvl) = torsion_level(&e, 5) else { continue };
                if lvl == 1 {
                    continue;
                }
                let (p, q) = torsion_basis(&e, 5, lvl).unwrap();
                for c in 0..5 {
                    let g = if c == 4 { q } else { e.add(&p, &e.mul(c as i128, &q)) };
                    // Galois-stable iff π(g) ∈ ⟨g⟩
                    let pi = e.frobenius(&g);
                    if !(0..5).any(|k| e.mul(k, &g) == pi) {
                        assert!(velu(&e, &[g]).is_err());
                        continue;
                    }
                    if g.level == 1 {
                        continue;
                    }
                    let phi = velu(&e, &[g]).unwrap();
                    assert_eq!(phi.codomain.order(1), e.order(1));
                    check_hom(&phi, 1, &mut rng);
                    check_hom(&phi, lvl, &mut rng);
                    found = true;
                    break 'search;
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn rejects_wild_kernels() {
        let t = Tower::new(5).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let Ok(e) = Curve::new(&t, a, b) else { continue };
                if e.order(1) % 5 == 0 {
                    let g = e.all_points(1).unwrap().into_iter().find(|p| e.point_order(p) == 5).unwrap();
                    assert!(matches!(velu(&e, &[g]), Err(Error::BadKernel(_))));
                    return;
                }
            }
        }
        panic!("no curve over F_5 with a point of order 5");
    }
}
