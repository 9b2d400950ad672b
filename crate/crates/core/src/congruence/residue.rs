//! The residue ring `O/m` and its unit group.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::quadforms::{Elem, QuadIdeal, QuadOrder};

/// A modulus `m` together with the Smith decomposition `O/m ≅ Z/a_m × Z/b_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modulus {
    pub ideal: QuadIdeal,
    pub norm: i64,
    pub a_m: i64,
    pub b_m: i64,
    /// Generator of order `a_m`.
    pub gen_a: Elem,
    /// Generator of order `b_m` (zero when `b_m = 1`).
    pub gen_b: Elem,
    /// Column transformation of the Smith reduction: coordinates are `(x, y)·V`.
    coord_matrix: [[i64; 2]; 2],
}

/// Smith normal form of a 2×2 integer matrix, tracking only the column transform `V`.
/// Returns `(d1, d2, V)` with `d1 | d2`.
fn smith_2x2(m: [[i128; 2]; 2]) -> (i128, i128, [[i128; 2]; 2]) {
    let mut a = m;
    let mut v = [[1i128, 0], [0, 1]];
    loop {
        // clear a[0][1] with column operations
        while a[0][1] != 0 {
            if a[0][0] == 0 || a[0][1].abs() < a[0][0].abs() {
                for row in a.iter_mut() {
                    row.swap(0, 1);
                }
                for row in v.iter_mut() {
                    row.swap(0, 1);
                }
                continue;
            }
            let q = a[0][1].div_euclid(a[0][0]);
            for row in a.iter_mut() {
                row[1] -= q * row[0];
            }
            for row in v.iter_mut() {
                row[1] -= q * row[0];
            }
        }
        // clear a[1][0] with row operations
        while a[1][0] != 0 {
            if a[0][0] == 0 || a[1][0].abs() < a[0][0].abs() {
                a.swap(0, 1);
                continue;
            }
            let q = a[1][0].div_euclid(a[0][0]);
            a[1][0] -= q * a[0][0];
            a[1][1] -= q * a[0][1];
        }
        if a[0][1] != 0 {
            continue;
        }
        let (d1, d2) = (a[0][0], a[1][1]);
        if d1 != 0 && d2 % d1 != 0 {
            a[0][1] = a[1][1];
            continue;
        }
        break;
    }
    for k in 0..2 {
        if a[k][k] < 0 {
            for row in a.iter_mut() {
                row[k] = -row[k];
            }
            for row in v.iter_mut() {
                row[k] = -row[k];
            }
        }
    }
    (a[0][0], a[1][1], v)
}

impl Modulus {
    pub fn new(o: &QuadOrder, ideal: QuadIdeal) -> Result<Self> {
        ideal.check(o)?;
        let (d1, d2, v) = smith_2x2([[ideal.a as i128, 0], [ideal.b as i128, ideal.c as i128]]);
        let det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
        // rows of V^{-1}
        let inv = [[v[1][1] * det, -v[0][1] * det], [-v[1][0] * det, v[0][0] * det]];
        let reduce = |e: Elem| ideal.reduce_elem(e);
        let gen_b = reduce(Elem::new(inv[0][0] as i64, inv[0][1] as i64));
        let gen_a = reduce(Elem::new(inv[1][0] as i64, inv[1][1] as i64));
        Ok(Modulus {
            ideal,
            norm: ideal.norm(),
            a_m: d2 as i64,
            b_m: d1 as i64,
            gen_a,
            gen_b: if d1 == 1 { Elem::new(0, 0) } else { gen_b },
            coord_matrix: [[v[0][0] as i64, v[0][1] as i64], [v[1][0] as i64, v[1][1] as i64]],
        })
    }

    /// The modulus `NO`.
    pub fn scalar(o: &QuadOrder, n: i64) -> Result<Self> {
        Self::new(o, QuadIdeal::integer(o, n))
    }

    /// The integer generator of `m ∩ Z`.
    pub fn int_gen(&self) -> i64 {
        self.ideal.a
    }

    pub fn reduce(&self, e: Elem) -> Elem {
        self.ideal.reduce_elem(e)
    }

    pub fn index(&self, e: Elem) -> usize {
        let r = self.reduce(e);
        (r.x * self.ideal.c + r.y) as usize
    }

    pub fn elem(&self, idx: usize) -> Elem {
        let idx = idx as i64;
        Elem::new(idx / self.ideal.c, idx % self.ideal.c)
    }

    pub fn residues(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.norm as usize).map(|i| self.elem(i))
    }

    /// Smith coordinates `(x mod a_m, y mod b_m)` with `e ≡ x·gen_a + y·gen_b`.
    pub fn coords(&self, e: Elem) -> (i64, i64) {
        let v = &self.coord_matrix;
        let s0 = e.x as i128 * v[0][0] as i128 + e.y as i128 * v[1][0] as i128;
        let s1 = e.x as i128 * v[0][1] as i128 + e.y as i128 * v[1][1] as i128;
        (s1.rem_euclid(self.a_m as i128) as i64, s0.rem_euclid(self.b_m as i128) as i64)
    }

    pub fn from_coords(&self, x: i64, y: i64) -> Elem {
        self.reduce(Elem::new(x * self.gen_a.x + y * self.gen_b.x, x * self.gen_a.y + y * self.gen_b.y))
    }

    pub fn mul(&self, o: &QuadOrder, u: Elem, v: Elem) -> Elem {
        self.reduce(o.mul(self.reduce(u), self.reduce(v)).expect("residues are small"))
    }

    /// `e` is invertible modulo `m`, i.e. `eO + m = O`.
    pub fn is_unit(&self, o: &QuadOrder, e: Elem) -> bool {
        let e = self.reduce(e);
        if e == Elem::new(0, 0) {
            return self.norm == 1;
        }
        match QuadIdeal::from_generators(o, &[e, Elem::int(self.ideal.a), Elem::new(self.ideal.b, self.ideal.c)]) {
            Ok(j) => j == QuadIdeal::unit(o),
            Err(_) => false,
        }
    }

    /// Integers are units modulo `m` exactly when coprime to `N(m)`.
    pub fn int_is_unit(&self, k: i64) -> bool {
        gcd(k, self.norm) == 1
    }
}

/// The unit group `(O/m)^×` with an explicit multiplication.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub elems: Vec<Elem>,
    pos: HashMap<Elem, usize>,
}

impl UnitGroup {
    pub fn new(o: &QuadOrder, m: &Modulus) -> Self {
        let elems: Vec<Elem> = m.residues().filter(|e| m.is_unit(o, *e)).collect();
        let pos = elems.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        UnitGroup { elems, pos }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn position(&self, m: &Modulus, e: Elem) -> Option<usize> {
        self.pos.get(&m.reduce(e)).copied()
    }

    /// Multiplication table indexed by positions.
    pub fn table(&self, o: &QuadOrder, m: &Modulus) -> Vec<Vec<usize>> {
        self.elems.iter().map(|u| self.elems.iter().map(|v| self.pos[&m.mul(o, *u, *v)]).collect()).collect()
    }

    pub fn inverse(&self, o: &QuadOrder, m: &Modulus, e: Elem) -> Result<Elem> {
        self.elems
            .iter()
            .copied()
            .find(|v| m.mul(o, e, *v) == m.reduce(Elem::ONE))
            .ok_or_else(|| Error::NotCoprime(format!("{e:?} is not a unit mod {:?}", m.ideal)))
    }
}

/// Explicit structure of `O/m`: Smith invariants and the unit group.
pub fn residue_ring(o: &QuadOrder, m: &Modulus) -> ((i64, i64), UnitGroup) {
    ((m.a_m, m.b_m), UnitGroup::new(o, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::order_from_disc;

    fn additive_order(m: &Modulus, e: Elem) -> i64 {
        let mut k = 1;
        let mut acc = m.reduce(e);
        while acc != Elem::new(0, 0) {
            acc = m.reduce(Elem::new(acc.x + e.x, acc.y + e.y));
            k += 1;
        }
        k
    }

    /// Oracle: the Smith generators have the declared orders and span O/m.
    fn check_smith(o: &QuadOrder, m: &Modulus) {
        assert_eq!(m.a_m * m.b_m, m.norm);
        assert_eq!(m.a_m % m.b_m, 0);
        assert_eq!(additive_order(m, m.gen_a), m.a_m);
        assert_eq!(additive_order(m, m.gen_b), m.b_m);
        let mut seen = std::collections::HashSet::new();
        for x in 0..m.a_m {
            for y in 0..m.b_m {
                let e = m.from_coords(x, y);
                assert_eq!(m.coords(e), (x, y));
                seen.insert(e);
            }
        }
        assert_eq!(seen.len() as i64, m.norm);
        let _ = o;
    }

    #[test]
    fn examples() {
        let o = order_from_disc(-44).unwrap();
        let m = Modulus::scalar(&o, 3).unwrap();
        assert_eq!((m.a_m, m.b_m), (3, 3));
        assert_eq!(UnitGroup::new(&o, &m).len(), 4);
        // (3, √−11 − 1) has normal form (3, 2 + ω)
        let p = QuadIdeal::from_generators(&o, &[Elem::int(3), Elem::new(-1, 1)]).unwrap();
        let m = Modulus::new(&o, p).unwrap();
        assert_eq!((m.a_m, m.b_m), (3, 1));
        let o4 = order_from_disc(-4).unwrap();
        assert_eq!(UnitGroup::new(&o4, &Modulus::scalar(&o4, 3).unwrap()).len(), 8);
    }

    #[test]
    fn smith_generators_span() {
        for d in [-4i64, -7, -15, -44, -56, -71] {
            let o = order_from_disc(d).unwrap();
            for n in 1..40 {
                for id in crate::quadforms::ideals_of_norm(&o, n) {
                    check_smith(&o, &Modulus::new(&o, id).unwrap());
                }
            }
        }
    }

    #[test]
    fn unit_count_matches_brute_force() {
        for d in [-4i64, -3, -20, -44] {
            let o = order_from_disc(d).unwrap();
            for n in [2i64, 3, 4, 5, 6, 9] {
                if !o.coprime_to_cond(n) {
                    continue;
                }
                let m = Modulus::scalar(&o, n).unwrap();
                let brute =
                    m.residues().filter(|u| m.residues().any(|v| m.mul(&o, *u, v) == m.reduce(Elem::ONE))).count();
                assert_eq!(UnitGroup::new(&o, &m).len(), brute);
            }
        }
    }
}
