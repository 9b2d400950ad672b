//! Short Weierstrass curves `y² = x³ + Ax + B` over `F_q` and their points over `F_{q^k}`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::field::{Fe, Field, Tower, MAX_LEVEL};
use crate::arith::factor128;
use crate::error::{domain, Error, Result};

/// A point over some level `F_{q^k}`; `level = 1` whenever both coordinates lie in `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub inf: bool,
    pub level: u8,
    pub x: Fe,
    pub y: Fe,
}

impl Point {
    pub const INFINITY: Point = Point { inf: true, level: 1, x: Fe::ZERO, y: Fe::ZERO };

    pub fn affine(x: Fe, y: Fe, level: u8) -> Point {
        let level = if x.is_constant() && y.is_constant() { 1 } else { level };
        Point { inf: false, level, x, y }
    }
}

/// Common level of two points; only `F_q`-points mix freely with other levels.
pub fn join_level(a: u8, b: u8) -> u8 {
    assert!(a == b || a == 1 || b == 1, "points live in incompatible fields (levels {a} and {b})");
    a.max(b)
}

#[derive(Clone, Debug)]
pub struct Curve {
    pub tower: Arc<Tower>,
    pub a: u64,
    pub b: u64,
    /// `#E(F_{q^k})` for `k = 1..=6`.
    pub orders: [u128; MAX_LEVEL],
}

impl PartialEq for Curve {
    fn eq(&self, other: &Self) -> bool {
        self.tower.p == other.tower.p && self.a == other.a && self.b == other.b
    }
}
impl Eq for Curve {}

impl Curve {
    pub fn new(tower: &Arc<Tower>, a: i64, b: i64) -> Result<Curve> {
        let p = tower.p;
        let (a, b) = (a.rem_euclid(p as i64) as u64, b.rem_euclid(p as i64) as u64);
        let disc = (4 * (a * a % p) % p * a + 27 * (b * b % p)) % p;
        if disc == 0 {
            return domain(format!("y^2 = x^3 + {a}x + {b} is singular over F_{p}"));
        }
        let mut sum: i64 = 0;
        for x in 0..p {
            let rhs = ((x * x % p + a) % p * x + b) % p;
            sum += tower.legendre(rhs) as i64;
        }
        let q = p as i128;
        let t = -sum as i128;
        let mut orders = [0u128; MAX_LEVEL];
        let (mut t_prev, mut t_cur) = (2i128, t);
        let mut qk = 1i128;
        for ord in orders.iter_mut() {
            qk *= q;
            *ord = (qk + 1 - t_cur) as u128;
            let next = t * t_cur - q * t_prev;
            t_prev = t_cur;
            t_cur = next;
        }
        Ok(Curve { tower: tower.clone(), a, b, orders })
    }

    pub fn p(&self) -> u64 {
        self.tower.p
    }

    pub fn field(&self, level: u8) -> &Field {
        self.tower.level(level)
    }

    /// Frobenius trace over `F_q`.
    pub fn trace(&self) -> i64 {
        (self.p() as i128 + 1 - self.orders[0] as i128) as i64
    }

    pub fn order(&self, level: u8) -> u128 {
        self.orders[level as usize - 1]
    }

    pub fn j_invariant(&self) -> u64 {
        let p = self.p();
        let f = self.field(1);
        let a3 = f.pow(Fe::constant(self.a), 3);
        let num = f.mul(f.from_int(6912), a3);
        let den = f.add(f.mul(f.from_int(4), a3), f.mul(f.from_int(27), f.sqr(Fe::constant(self.b))));
        f.div(num, den).expect("nonsingular").0[0] as u64 % p
    }

    pub fn is_supersingular(&self) -> bool {
        self.trace() % self.p() as i64 == 0
    }

    fn rhs(&self, f: &Field, x: Fe) -> Fe {
        f.add(f.mul(f.add(f.sqr(x), Fe::constant(self.a)), x), Fe::constant(self.b))
    }

    pub fn contains(&self, pt: &Point) -> bool {
        if pt.inf {
            return true;
        }
        let f = self.field(pt.level);
        f.sqr(pt.y) == self.rhs(f, pt.x)
    }

    pub fn point(&self, x: Fe, y: Fe, level: u8) -> Result<Point> {
        let pt = Point::affine(x, y, level);
        if !self.contains(&pt) {
            return domain(format!("({x:?}, {y:?}) is not on the curve"));
        }
        Ok(pt)
    }

    /// The points with the given x-coordinate (zero, one or two of them).
    pub fn lift_x(&self, x: Fe, level: u8) -> Vec<Point> {
        let f = self.field(level);
        match f.sqrt(self.rhs(f, x)) {
            None => vec![],
            Some(y) if y.is_zero() => vec![Point::affine(x, y, level)],
            Some(y) => vec![Point::affine(x, y, level), Point::affine(x, f.neg(y), level)],
        }
    }

    pub fn neg(&self, pt: &Point) -> Point {
        if pt.inf {
            return *pt;
        }
        Point::affine(pt.x, self.field(pt.level).neg(pt.y), pt.level)
    }

    pub fn add(&self, p1: &Point, p2: &Point) -> Point {
        if p1.inf {
            return *p2;
        }
        if p2.inf {
            return *p1;
        }
        let level = join_level(p1.level, p2.level);
        let f = self.field(level);
        let lambda = if p1.x == p2.x {
            if f.add(p1.y, p2.y).is_zero() {
                return Point::INFINITY;
            }
            let num = f.add(f.scale(3, f.sqr(p1.x)), Fe::constant(self.a));
            f.div(num, f.scale(2, p1.y)).expect("y ≠ 0")
        } else {
            f.div(f.sub(p2.y, p1.y), f.sub(p2.x, p1.x)).expect("x1 ≠ x2")
        };
        let x3 = f.sub(f.sub(f.sqr(lambda), p1.x), p2.x);
        let y3 = f.sub(f.mul(lambda, f.sub(p1.x, x3)), p1.y);
        Point::affine(x3, y3, level)
    }

    pub fn sub(&self, p1: &Point, p2: &Point) -> Point {
        self.add(p1, &self.neg(p2))
    }

    pub fn double(&self, pt: &Point) -> Point {
        self.add(pt, pt)
    }

    pub fn mul(&self, k: i128, pt: &Point) -> Point {
        let mut base = if k < 0 { self.neg(pt) } else { *pt };
        let mut e = k.unsigned_abs();
        let mut acc = Point::INFINITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.double(&base);
            e >>= 1;
        }
        acc
    }

    /// `a·P + b·Q`.
    pub fn lin(&self, a: i128, p1: &Point, b: i128, p2: &Point) -> Point {
        self.add(&self.mul(a, p1), &self.mul(b, p2))
    }

    /// The `q`-power Frobenius.
    pub fn frobenius(&self, pt: &Point) -> Point {
        if pt.inf {
            return *pt;
        }
        let f = self.field(pt.level);
        Point::affine(f.frobenius(pt.x), f.frobenius(pt.y), pt.level)
    }

    /// Order of a point, given a multiple of it.
    pub fn order_dividing(&self, pt: &Point, multiple: u128) -> u128 {
        let mut n = multiple;
        for (l, _) in factor128(multiple) {
            while n % l == 0 && self.mul((n / l) as i128, pt).inf {
                n /= l;
            }
        }
        n
    }

    /// Order of a point of `E(F_{q^k})` where `k` is its level.
    pub fn point_order(&self, pt: &Point) -> u128 {
        self.order_dividing(pt, self.order(pt.level))
    }

    pub fn random_point<R: Rng + ?Sized>(&self, level: u8, rng: &mut R) -> Point {
        let f = self.field(level);
        loop {
            let x = f.random(rng);
            let pts = self.lift_x(x, level);
            if !pts.is_empty() {
                return pts[rng.gen_range(0..pts.len())];
            }
        }
    }

    /// All points over level `k` (exhaustive; small fields only).
    pub fn all_points(&self, level: u8) -> Result<Vec<Point>> {
        let f = self.field(level);
        if f.size > 2_000_000 {
            return Err(Error::Budget(format!("refusing to enumerate a field of size {}", f.size)));
        }
        let mut out = vec![Point::INFINITY];
        for i in 0..f.size {
            out.extend(self.lift_x(f.from_index(i), level));
        }
        Ok(out)
    }

    /// Roots of `x³ + Ax + B` in `F_q`.
    pub fn rational_two_torsion(&self) -> Vec<Point> {
        let p = self.p();
        (0..p)
            .filter(|x| ((x * x % p + self.a) % p * x + self.b) % p == 0)
            .map(|x| Point::affine(Fe::constant(x), Fe::ZERO, 1))
            .collect()
    }

    /// The curve `(u⁴A, u⁶B)` and the isomorphism `(x, y) ↦ (u²x, u³y)`.
    pub fn scaled(&self, u: u64) -> Curve {
        let p = self.p() as u128;
        let u = u as u128 % p;
        let u2 = u * u % p;
        let u4 = u2 * u2 % p;
        let u6 = u4 * u2 % p;
        Curve {
            tower: self.tower.clone(),
            a: (u4 * self.a as u128 % p) as u64,
            b: (u6 * self.b as u128 % p) as u64,
            orders: self.orders,
        }
    }

    /// Canonical member of the `F_q`-isomorphism class: the least `(A, B)` among
    /// `(u⁴A, u⁶B)`, together with a `u` realizing it.
    pub fn canonical(&self) -> (Curve, u64) {
        let p = self.p();
        let mut best = (self.a, self.b, 1u64);
        for u in 2..p {
            let c = self.scaled(u);
            if (c.a, c.b) < (best.0, best.1) {
                best = (c.a, c.b, u);
            }
        }
        (self.scaled(best.2), best.2)
    }

    /// Pushes a point through `(x, y) ↦ (u²x, u³y)`.
    pub fn scale_point(&self, u: u64, pt: &Point) -> Point {
        if pt.inf {
            return *pt;
        }
        let f = self.field(pt.level);
        let u = Fe::constant(u % self.p());
        let u2 = f.sqr(u);
        Point::affine(f.mul(u2, pt.x), f.mul(f.mul(u2, u), pt.y), pt.level)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub q: u64,
    pub k: u8,
    pub modpoly: Vec<u64>,
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "B")]
    pub b: u64,
    /// `None` for the point at infinity.
    pub x: Option<Vec<u64>>,
    pub y: Option<Vec<u64>>,
}

impl Curve {
    pub fn point_record(&self, pt: &Point) -> PointRecord {
        let f = self.field(pt.level);
        PointRecord {
            q: self.p(),
            k: pt.level,
            modpoly: f.modulus.clone(),
            a: self.a,
            b: self.b,
            x: (!pt.inf).then(|| f.coeffs(pt.x)),
            y: (!pt.inf).then(|| f.coeffs(pt.y)),
        }
    }

    pub fn point_from_record(&self, r: &PointRecord) -> Result<Point> {
        if r.q != self.p() || r.a != self.a || r.b != self.b {
            return domain("point record belongs to a different curve");
        }
        let f = self.field(r.k);
        if f.modulus != r.modpoly {
            return domain("point record uses a different field modulus");
        }
        match (&r.x, &r.y) {
            (Some(x), Some(y)) => self.point(f.from_coeffs(x)?, f.from_coeffs(y)?, r.k),
            _ => Ok(Point::INFINITY),
        }
    }
}
