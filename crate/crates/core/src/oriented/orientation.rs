//! Primitive orientations `ι: O → End(E)` given by `ι(ω) = (u + vπ)/w`.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, gcd_u, inv_mod, is_square};
use crate::curvefield::{dlog_2d, torsion_basis, torsion_level, Curve, Fe, Point};
use crate::error::{Error, Result};
use crate::quadforms::{Elem, QuadOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub disc: i64,
    /// Frobenius trace and field size the descriptor refers to.
    pub t: i64,
    pub q: u64,
    pub u: i64,
    pub v: i64,
    pub w: i64,
}

impl Orientation {
    /// Checks that `(u + vπ)/w` has the minimal polynomial of `ω`.
    pub fn new(order: &QuadOrder, t: i64, q: u64, u: i64, v: i64, w: i64) -> Result<Self> {
        let (qi, ti) = (q as i128, t as i128);
        let (u1, v1, w1) = (u as i128, v as i128, w as i128);
        let tr = 2 * u1 + v1 * ti;
        let nm = u1 * u1 + u1 * v1 * ti + v1 * v1 * qi;
        if w < 1 || tr != order.omega_trace as i128 * w1 || nm != order.omega_norm as i128 * w1 * w1 {
            return Err(Error::Domain(format!(
                "(u, v, w) = ({u}, {v}, {w}) does not describe ω of discriminant {} for trace {t} over F_{q}",
                order.disc
            )));
        }
        Ok(Orientation { disc: order.disc, t, q, u, v, w })
    }

    /// The orientation by `O` induced by Frobenius, when `t² − 4q = c²·disc(O)`.
    pub fn from_frobenius(order: &QuadOrder, t: i64, q: u64) -> Result<Self> {
        let d = t as i128 * t as i128 - 4 * q as i128;
        let c2 = d / order.disc as i128;
        let c = match is_square(c2) {
            Some(c) if c2 * order.disc as i128 == d && c > 0 => c as i64,
            _ => return Err(Error::Domain(format!("t^2 - 4q = {d} is not a square multiple of {}", order.disc))),
        };
        // ω = (c·t_D − t + 2π)/(2c)
        let (mut u, mut v, mut w) = (c * order.omega_trace - t, 2, 2 * c);
        let g = gcd(gcd(u, v), w);
        u /= g;
        v /= g;
        w /= g;
        Self::new(order, t, q, u, v, w)
    }

    pub fn order(&self) -> QuadOrder {
        crate::quadforms::order_from_disc(self.disc).expect("validated discriminant")
    }
}

/// Closed-form automorphism realizing `ι(ω)` on curves with `j ∈ {0, 1728}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Auto {
    /// `(x, y) ↦ (−x, θy)`
    J1728(u64),
    /// `(x, y) ↦ (ζx, −y)`
    J0(u64),
}

/// An elliptic curve with a primitive orientation.
#[derive(Clone, Debug)]
pub struct OrientedCurve {
    pub curve: Curve,
    pub orientation: Orientation,
    pub order: QuadOrder,
    auto: Option<Auto>,
}

impl PartialEq for OrientedCurve {
    fn eq(&self, other: &Self) -> bool {
        self.curve == other.curve && self.orientation == other.orientation
    }
}
impl Eq for OrientedCurve {}

impl OrientedCurve {
    pub fn new(curve: Curve, orientation: Orientation) -> Result<Self> {
        if curve.p() != orientation.q || curve.trace() != orientation.t {
            return Err(Error::Domain(format!(
                "curve has trace {} over F_{}, orientation expects {} over F_{}",
                curve.trace(),
                curve.p(),
                orientation.t,
                orientation.q
            )));
        }
        let order = orientation.order();
        let mut oc = OrientedCurve { curve, orientation, order, auto: None };
        if matches!(order.disc, -3 | -4) && oc.orientation.w > 1 {
            oc.auto = Some(oc.calibrate_auto()?);
        }
        Ok(oc)
    }

    /// Orientation by Frobenius for the order of discriminant `disc`.
    pub fn from_frobenius(curve: Curve, disc: i64) -> Result<Self> {
        let order = crate::quadforms::order_from_disc(disc)?;
        let o = Orientation::from_frobenius(&order, curve.trace(), curve.p())?;
        Self::new(curve, o)
    }

    /// Same orientation descriptor on another curve (codomain of a horizontal isogeny).
    pub fn transport(&self, curve: Curve) -> Result<Self> {
        Self::new(curve, self.orientation)
    }

    fn calibrate_auto(&self) -> Result<Auto> {
        let e = &self.curve;
        let p = e.p();
        let w = self.orientation.w as u64;
        let cands: Vec<Auto> = if e.b == 0 {
            (1..p).filter(|t| t * t % p == p - 1).map(Auto::J1728).collect()
        } else if e.a == 0 {
            (2..p).filter(|z| z * z % p * z % p == 1).map(Auto::J0).collect()
        } else {
            vec![]
        };
        // a test point of order coprime to w·p and > 2, at the lowest level that has one
        for level in 1..=crate::curvefield::MAX_LEVEL as u8 {
            let n = e.order(level);
            let mut m = n;
            for l in crate::arith::factor(w).into_iter().map(|(l, _)| l).chain([p]) {
                while m % l as u128 == 0 {
                    m /= l as u128;
                }
            }
            if m <= 2 {
                continue;
            }
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(p ^ e.a ^ (e.b << 17));
            for _ in 0..50 {
                let pt = e.mul((n / m) as i128, &e.random_point(level, &mut rng));
                if pt.inf || e.point_order(&pt) <= 2 {
                    continue;
                }
                let target = self.sigma_via_frobenius(&pt)?;
                let hits: Vec<Auto> = cands.iter().copied().filter(|a| self.apply_auto(*a, &pt) == target).collect();
                if hits.len() == 1 {
                    return Ok(hits[0]);
                }
            }
        }
        Err(Error::Consistency("no closed-form automorphism matches ι(ω)".into()))
    }

    fn apply_auto(&self, a: Auto, pt: &Point) -> Point {
        if pt.inf {
            return *pt;
        }
        let f = self.curve.field(pt.level);
        match a {
            Auto::J1728(theta) => Point::affine(f.neg(pt.x), f.mul(Fe::constant(theta), pt.y), pt.level),
            Auto::J0(zeta) => Point::affine(f.mul(Fe::constant(zeta), pt.x), f.neg(pt.y), pt.level),
        }
    }

    /// `ι(ω)(P)` from the Frobenius expression, dividing by `w` when needed.
    fn sigma_via_frobenius(&self, pt: &Point) -> Result<Point> {
        let e = &self.curve;
        let Orientation { u, v, w, .. } = self.orientation;
        if pt.inf {
            return Ok(*pt);
        }
        let n = e.point_order(pt);
        if gcd_u(n as u64, e.p()) != 1 {
            return Err(Error::Precondition(format!("point order {n} is divisible by the characteristic")));
        }
        let apply = |r: &Point| e.add(&e.mul(u as i128, r), &e.mul(v as i128, &e.frobenius(r)));
        if w == 1 {
            return Ok(apply(pt));
        }
        if let Some(winv) = inv_mod(w as i128, n as i128) {
            return Ok(apply(&e.mul(winv, pt)));
        }
        // R with wR = P inside E[nw]
        let nw = n as u64 * w as u64;
        let level = torsion_level(e, nw).ok_or(Error::TorsionUnavailable {
            n: nw,
            level: pt.level,
            minimal: "none up to 6".into(),
        })?;
        if pt.level != 1 && pt.level != level {
            return Err(Error::Precondition(format!(
                "division by {w} needs E[{nw}] at level {level}, but the point lives at level {}",
                pt.level
            )));
        }
        let (b1, b2) = torsion_basis(e, nw, level)?;
        let (x, y) = dlog_2d(e, pt, &b1, &b2, nw)?;
        let (w64, x, y) = (w as u64, x, y);
        if x % w64 != 0 || y % w64 != 0 {
            return Err(Error::Consistency("point is not divisible by w inside E[nw]".into()));
        }
        Ok(apply(&e.lin((x / w64) as i128, &b1, (y / w64) as i128, &b2)))
    }

    /// `ι(ω)(P)`.
    pub fn sigma(&self, pt: &Point) -> Result<Point> {
        match self.auto {
            Some(a) => Ok(self.apply_auto(a, pt)),
            None => self.sigma_via_frobenius(pt),
        }
    }

    /// The Frobenius-route evaluation, bypassing any closed-form automorphism.
    pub fn sigma_frobenius_route(&self, pt: &Point) -> Result<Point> {
        self.sigma_via_frobenius(pt)
    }

    pub fn has_closed_form(&self) -> bool {
        self.auto.is_some()
    }

    /// `ι(x + yω)(P)`.
    pub fn apply(&self, alpha: Elem, pt: &Point) -> Result<Point> {
        let e = &self.curve;
        let s = if alpha.y == 0 { Point::INFINITY } else { self.sigma(pt)? };
        Ok(e.add(&e.mul(alpha.x as i128, pt), &e.mul(alpha.y as i128, &s)))
    }
}

/// Free-function form of [`OrientedCurve::sigma`].
pub fn sigma_eval(oc: &OrientedCurve, pt: &Point) -> Result<Point> {
    oc.sigma(pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvefield::{supersingular_floor_set, Tower};
    use crate::quadforms::order_from_disc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn descriptors() {
        let o = order_from_disc(-44).unwrap();
        let f = Orientation::from_frobenius(&o, 0, 11).unwrap();
        assert_eq!((f.u, f.v, f.w), (0, 1, 1));
        let o = order_from_disc(-4).unwrap();
        let s = Orientation::from_frobenius(&o, 4, 13).unwrap();
        assert_eq!((s.u, s.v, s.w), (-2, 1, 3));
        let o = order_from_disc(-36).unwrap();
        let s = Orientation::from_frobenius(&o, 4, 13).unwrap();
        assert_eq!((s.u, s.v, s.w), (-2, 1, 1));
        assert!(Orientation::from_frobenius(&order_from_disc(-8).unwrap(), 4, 13).is_err());
        assert!(Orientation::new(&o, 4, 13, -2, 1, 2).is_err());
    }

    #[test]
    fn floor_sigma_is_frobenius() {
        let e = supersingular_floor_set(11).unwrap().remove(0);
        let oc = OrientedCurve::from_frobenius(e.clone(), -44).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let pt = e.random_point(2, &mut rng);
            let s = oc.sigma(&pt).unwrap();
            assert_eq!(s, e.frobenius(&pt));
            assert_eq!(oc.sigma(&s).unwrap(), e.mul(-11, &pt));
        }
    }

    #[test]
    fn closed_form_matches_division_route() {
        let t = Tower::new(13).unwrap();
        let e = (1..13).map(|c| Curve::new(&t, c, 0).unwrap()).find(|e| e.trace() == 4).unwrap();
        let oc = OrientedCurve::from_frobenius(e.clone(), -4).unwrap();
        assert!(oc.has_closed_form());
        let lvl = torsion_level(&e, 9).unwrap();
        let (b1, b2) = torsion_basis(&e, 9, lvl).unwrap();
        let (p3, q3) = (e.mul(3, &b1), e.mul(3, &b2));
        for x in 0..3 {
            for y in 0..3 {
                let pt = e.lin(x, &p3, y, &q3);
                assert_eq!(oc.sigma(&pt).unwrap(), oc.sigma_frobenius_route(&pt).unwrap());
                // σ² = −1
                assert_eq!(oc.sigma(&oc.sigma(&pt).unwrap()).unwrap(), e.neg(&pt));
            }
        }
    }
}
