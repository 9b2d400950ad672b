use serde::{Deserialize, Serialize};

use super::{BQForm, Elem, QuadOrder};
use crate::arith::{gcd, kronecker, narrow};
use crate::error::{domain, Error, Result};

/// An integral ideal `Z·a + Z·(b + cω)` in normal form:
/// `c > 0`, `c | a`, `c | b`, `0 ≤ b < a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadIdeal {
    pub disc: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// A fractional ideal `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FracIdeal {
    pub num: QuadIdeal,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitType {
    Split(QuadIdeal, QuadIdeal),
    Inert(QuadIdeal),
    Ramified(QuadIdeal),
}

/// Hermite normal form of the lattice spanned by `gens` (coordinates in `(1, ω)`).
/// Returns `(a, b, c)` with lattice `Z(a, 0) + Z(b, c)`, or `None` if rank < 2.
pub(crate) fn hnf(gens: &[(i128, i128)]) -> Option<(i128, i128, i128)> {
    let mut rows: Vec<(i128, i128)> = gens.iter().copied().filter(|r| *r != (0, 0)).collect();
    // Euclid on the second coordinate until a single row carries it.
    loop {
        let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].1 != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let (i, j) = if rows[nz[0]].1.abs() <= rows[nz[1]].1.abs() { (nz[0], nz[1]) } else { (nz[1], nz[0]) };
        let q = rows[j].1.div_euclid(rows[i].1);
        rows[j] = (rows[j].0 - q * rows[i].0, rows[j].1 - q * rows[i].1);
    }
    let pivot = rows.iter().position(|r| r.1 != 0)?;
    let (mut b, mut c) = rows[pivot];
    if c < 0 {
        b = -b;
        c = -c;
    }
    let a = rows.iter().enumerate().filter(|(k, _)| *k != pivot).fold(0i128, |g, (_, r)| crate::arith::xgcd(g, r.0).0);
    if a == 0 {
        return None;
    }
    Some((a, b.rem_euclid(a), c))
}

impl QuadIdeal {
    /// The unit ideal `O`.
    pub fn unit(o: &QuadOrder) -> Self {
        QuadIdeal { disc: o.disc, a: 1, b: 0, c: 1 }
    }

    /// The principal ideal `nO` for a positive integer `n`.
    pub fn integer(o: &QuadOrder, n: i64) -> Self {
        QuadIdeal { disc: o.disc, a: n, b: 0, c: n }
    }

    pub fn norm(&self) -> i64 {
        self.a * self.c
    }

    /// Z-basis `a`, `b + cω`.
    pub fn basis(&self) -> [Elem; 2] {
        [Elem::int(self.a), Elem::new(self.b, self.c)]
    }

    /// The O-ideal generated by the given elements.
    pub fn from_generators(o: &QuadOrder, gens: &[Elem]) -> Result<Self> {
        let mut lat = Vec::with_capacity(2 * gens.len());
        for g in gens {
            let gw = o.mul(*g, Elem::OMEGA)?;
            lat.push((g.x as i128, g.y as i128));
            lat.push((gw.x as i128, gw.y as i128));
        }
        Self::from_lattice(o, &lat)
    }

    fn from_lattice(o: &QuadOrder, lat: &[(i128, i128)]) -> Result<Self> {
        let (a, b, c) = hnf(lat).ok_or_else(|| Error::Domain("zero or rank-1 lattice".into()))?;
        Ok(QuadIdeal { disc: o.disc, a: narrow(a, "ideal a")?, b: narrow(b, "ideal b")?, c: narrow(c, "ideal c")? })
    }

    /// Primitive part `[A, B + ω]` with `self = c·[A, B + ω]`.
    pub fn primitive_part(&self) -> (i64, i64) {
        (self.a / self.c, self.b / self.c)
    }

    /// The binary quadratic form attached to the oriented basis `(A, B + ω)`.
    pub fn to_form(&self, o: &QuadOrder) -> BQForm {
        let (a, b) = self.primitive_part();
        let n = o.norm(Elem::new(b, 1));
        BQForm::new(a, 2 * b + o.omega_trace, (n / a as i128) as i64)
    }

    /// The ideal `[a, B + ω]` of a form `(a, b, c)`, `B = (b − t)/2`.
    pub fn from_form(o: &QuadOrder, f: &BQForm) -> Result<Self> {
        if f.disc() != o.disc {
            return domain(format!("form {:?} has discriminant {} ≠ {}", f, f.disc(), o.disc));
        }
        let bb = (f.b - o.omega_trace) / 2;
        Ok(QuadIdeal { disc: o.disc, a: f.a, b: bb.rem_euclid(f.a), c: 1 })
    }

    /// Lattice is stable under multiplication by ω.
    pub fn is_ideal(&self, o: &QuadOrder) -> bool {
        if self.c <= 0 || self.a <= 0 || self.a % self.c != 0 || self.b % self.c != 0 {
            return false;
        }
        let (a, b) = self.primitive_part();
        o.norm(Elem::new(b, 1)) % a as i128 == 0
    }

    /// Multiplier ring equals `O`.
    pub fn is_proper(&self, o: &QuadOrder) -> bool {
        self.is_ideal(o) && self.to_form(o).is_primitive()
    }

    /// Proper and of norm coprime to the conductor of `O`.
    pub fn check(&self, o: &QuadOrder) -> Result<()> {
        if self.disc != o.disc {
            return Err(Error::NotProper(format!("{self:?} belongs to another order")));
        }
        if !self.is_proper(o) || !o.coprime_to_cond(self.norm()) {
            return Err(Error::NotProper(format!("{self:?}")));
        }
        Ok(())
    }

    pub fn contains(&self, e: Elem) -> bool {
        // e = x + yω ∈ Z a + Z (b + cω) ⇔ c | y and a | x − (y/c)·b
        if e.y % self.c != 0 {
            return false;
        }
        let k = e.y / self.c;
        (e.x as i128 - k as i128 * self.b as i128) % self.a as i128 == 0
    }

    pub fn mul(&self, o: &QuadOrder, other: &QuadIdeal) -> Result<QuadIdeal> {
        self.check(o)?;
        other.check(o)?;
        self.mul_lattice(o, other)
    }

    pub(crate) fn mul_lattice(&self, o: &QuadOrder, other: &QuadIdeal) -> Result<QuadIdeal> {
        let mut lat = Vec::with_capacity(4);
        for u in self.basis() {
            for v in other.basis() {
                let p = o.mul(u, v)?;
                lat.push((p.x as i128, p.y as i128));
            }
        }
        Self::from_lattice(o, &lat)
    }

    pub fn conj(&self, o: &QuadOrder) -> QuadIdeal {
        let g = o.conj(Elem::new(self.b, self.c));
        Self::from_lattice(o, &[(self.a as i128, 0), (g.x as i128, g.y as i128)])
            .expect("conjugate of a rank-2 lattice")
    }

    /// `self + other`.
    pub fn sum(&self, o: &QuadOrder, other: &QuadIdeal) -> QuadIdeal {
        let mut lat = Vec::new();
        for e in self.basis().into_iter().chain(other.basis()) {
            lat.push((e.x as i128, e.y as i128));
        }
        Self::from_lattice(o, &lat).expect("sum of ideals has rank 2")
    }

    pub fn is_coprime_to(&self, o: &QuadOrder, other: &QuadIdeal) -> bool {
        self.sum(o, other) == QuadIdeal::unit(o)
    }

    /// The extension `self·O` of an ideal of the suborder `Z + fO` to `O`.
    pub fn extend_to(&self, sub: &QuadOrder, sup: &QuadOrder) -> Result<QuadIdeal> {
        let f2 = sub.disc / sup.disc;
        let f = crate::arith::is_square(f2 as i128).ok_or_else(|| Error::Domain("not a suborder".into()))? as i64;
        let wp = sup.suborder_omega(f);
        // b + cω' = (b + c·k) + c·f·ω
        let g = Elem::new(self.b + self.c * wp.x, self.c * wp.y);
        QuadIdeal::from_generators(sup, &[Elem::int(self.a), g])
    }

    /// Generator `α` with `αO = self`, by enumerating the elements of norm `N(self)`.
    pub fn principal_generator(&self, o: &QuadOrder) -> Option<Elem> {
        for alpha in o.elements_of_norm(self.norm() as i128) {
            if let Ok(j) = QuadIdeal::from_generators(o, &[alpha]) {
                if j == *self {
                    return Some(alpha);
                }
            }
        }
        None
    }

    /// Decomposes the ideal into prime ideals (with multiplicity).
    /// Requires the norm to be coprime to the conductor.
    pub fn prime_factors(&self, o: &QuadOrder) -> Result<Vec<QuadIdeal>> {
        self.check(o)?;
        let mut out = Vec::new();
        let (prim_a, prim_b) = self.primitive_part();
        for (l, e) in crate::arith::factor(self.c as u64) {
            match splitting_type(o, l as i64)? {
                SplitType::Split(p, q) => {
                    for _ in 0..e {
                        out.push(p);
                        out.push(q);
                    }
                }
                SplitType::Inert(p) => out.extend(std::iter::repeat(p).take(e as usize)),
                SplitType::Ramified(p) => out.extend(std::iter::repeat(p).take(2 * e as usize)),
            }
        }
        for (l, e) in crate::arith::factor(prim_a as u64) {
            let l = l as i64;
            let p = QuadIdeal { disc: o.disc, a: l, b: prim_b.rem_euclid(l), c: 1 };
            if !p.is_proper(o) {
                return Err(Error::Consistency(format!("prime factor {p:?} of {self:?} is not an ideal")));
            }
            out.extend(std::iter::repeat(p).take(e as usize));
        }
        out.sort();
        Ok(out)
    }

    /// Element of `O` whose class modulo this ideal is `e`, reduced to the canonical
    /// coset representative.
    pub fn reduce_elem(&self, e: Elem) -> Elem {
        let y = e.y.rem_euclid(self.c);
        let k = (e.y - y) / self.c;
        let x = (e.x as i128 - k as i128 * self.b as i128).rem_euclid(self.a as i128) as i64;
        Elem::new(x, y)
    }
}

impl FracIdeal {
    /// Builds `num/den` with the common integer content removed.
    pub fn new(num: QuadIdeal, den: i64) -> Result<Self> {
        if den <= 0 {
            return domain("denominator must be positive");
        }
        let g = gcd(gcd(num.c, num.b), gcd(num.a, den));
        let num = QuadIdeal { disc: num.disc, a: num.a / g, b: num.b / g, c: num.c / g };
        Ok(FracIdeal { num, den: den / g })
    }

    pub fn integral(num: QuadIdeal) -> Self {
        FracIdeal { num, den: 1 }
    }
}

/// Decomposition type of the rational prime `l` in `O`.
pub fn splitting_type(o: &QuadOrder, l: i64) -> Result<SplitType> {
    if !crate::arith::is_prime(l as u64) {
        return domain(format!("{l} is not prime"));
    }
    if o.cond % l == 0 {
        return domain(format!("{l} divides the conductor {}", o.cond));
    }
    let roots: Vec<i64> = (0..l).filter(|&b| o.norm(Elem::new(b, 1)) % l as i128 == 0).collect();
    let mk = |b: i64| QuadIdeal { disc: o.disc, a: l, b, c: 1 };
    Ok(match kronecker(o.disc, l as u64) {
        1 => SplitType::Split(mk(roots[0]), mk(roots[1])),
        0 => SplitType::Ramified(mk(roots[0])),
        _ => SplitType::Inert(QuadIdeal::integer(o, l)),
    })
}

/// All proper integral ideals of norm `n` (norm coprime to the conductor).
pub fn ideals_of_norm(o: &QuadOrder, n: i64) -> Vec<QuadIdeal> {
    let mut out = Vec::new();
    if !o.coprime_to_cond(n) {
        return out;
    }
    let mut c = 1i64;
    while c * c <= n {
        if n % (c * c) == 0 {
            let a = n / (c * c);
            for b in 0..a {
                let id = QuadIdeal { disc: o.disc, a: a * c, b: b * c, c };
                if id.is_proper(o) {
                    out.push(id);
                }
            }
        }
        c += 1;
    }
    out
}
