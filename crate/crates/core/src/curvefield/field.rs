//! Finite fields `F_{q^k}`, `k ≤ 6`, as `F_q[x]/(f_k)`.
//!
//! Every level shares the same coefficient layout, so an element of `F_q`
//! (a constant polynomial) is a valid element of every level.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{domain, Result};

pub const MAX_LEVEL: usize = 6;

/// Coefficients of a field element, constant term first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fe(pub [u32; MAX_LEVEL]);

impl Fe {
    pub const ZERO: Fe = Fe([0; MAX_LEVEL]);

    pub fn constant(c: u64) -> Fe {
        let mut a = [0u32; MAX_LEVEL];
        a[0] = c as u32;
        Fe(a)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0)
    }

    /// Whether the element lies in the prime field.
    pub fn is_constant(&self) -> bool {
        self.0[1..].iter().all(|c| *c == 0)
    }

    pub fn constant_value(&self) -> Option<u64> {
        self.is_constant().then_some(self.0[0] as u64)
    }
}

/// `F_{p^k}` with a fixed monic irreducible modulus.
#[derive(Clone, Debug)]
pub struct Field {
    pub p: u64,
    pub k: usize,
    /// Monic modulus, constant term first, length `k + 1`.
    pub modulus: Vec<u64>,
    pub size: u128,
    nonresidue: Fe,
}

/// The fields `F_p, F_{p^2}, …, F_{p^6}` over one prime.
#[derive(Debug)]
pub struct Tower {
    pub p: u64,
    levels: Vec<Field>,
    squares: Vec<bool>,
}

impl Tower {
    pub fn new(p: u64) -> Result<Arc<Tower>> {
        if !(5..=1 << 16).contains(&p) || !is_prime(p) {
            return domain(format!("characteristic must be a prime in [5, 65536], got {p}"));
        }
        let mut squares = vec![false; p as usize];
        for x in 0..p {
            squares[(x * x % p) as usize] = true;
        }
        let levels = (1..=MAX_LEVEL).map(|k| Field::new(p, k)).collect();
        Ok(Arc::new(Tower { p, levels, squares }))
    }

    /// The field of degree `k` over `F_p`.
    pub fn level(&self, k: u8) -> &Field {
        assert!((1..=MAX_LEVEL as u8).contains(&k), "field level {k} out of range");
        &self.levels[k as usize - 1]
    }

    /// Quadratic character on `F_p`.
    pub fn legendre(&self, a: u64) -> i32 {
        let a = a % self.p;
        if a == 0 {
            0
        } else if self.squares[a as usize] {
            1
        } else {
            -1
        }
    }
}

// ---- polynomials over F_p, used only to pick the moduli ----

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = crate::arith::pow_mod(m[dm], p - 2, p);
    while r.len() > dm {
        let d = r.len() - 1;
        let c = r[d] * lead_inv % p;
        for i in 0..=dm {
            r[d - dm + i] = (r[d - dm + i] + p * p - c * m[i] % p) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    for _ in 0..d / 2 {
        xp = poly_powmod(&xp, p, f, p);
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        if poly_gcd(f, &diff, p).len() != 1 {
            return false;
        }
    }
    true
}

impl Field {
    fn new(p: u64, k: usize) -> Field {
        // smallest monic irreducible, ordering candidates by Σ c_i p^i
        let mut idx: u128 = 0;
        let modulus = loop {
            let mut f = Vec::with_capacity(k + 1);
            let mut n = idx;
            for _ in 0..k {
                f.push((n % p as u128) as u64);
                n /= p as u128;
            }
            f.push(1);
            if k == 1 || (f[0] != 0 && is_irreducible(&f, p)) {
                break f;
            }
            idx += 1;
        };
        let mut field = Field { p, k, modulus, size: (p as u128).pow(k as u32), nonresidue: Fe::ZERO };
        let mut i = 1u128;
        field.nonresidue = loop {
            let cand = field.from_index(i);
            if !field.is_square(cand) {
                break cand;
            }
            i += 1;
        };
        field
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe::constant(1)
    }

    pub fn from_int(&self, v: i64) -> Fe {
        Fe::constant(v.rem_euclid(self.p as i64) as u64)
    }

    /// Element with base-`p` digits of `i` as coefficients.
    pub fn from_index(&self, mut i: u128) -> Fe {
        let mut out = Fe::ZERO;
        for c in out.0.iter_mut().take(self.k) {
            *c = (i % self.p as u128) as u32;
            i /= self.p as u128;
        }
        out
    }

    pub fn to_index(&self, a: Fe) -> u128 {
        a.0[..self.k].iter().rev().fold(0u128, |acc, c| acc * self.p as u128 + *c as u128)
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Result<Fe> {
        if c.len() > self.k || c.iter().any(|v| *v >= self.p) {
            return domain(format!("coefficients {c:?} do not describe an element of F_{}^{}", self.p, self.k));
        }
        let mut out = Fe::ZERO;
        for (i, v) in c.iter().enumerate() {
            out.0[i] = *v as u32;
        }
        Ok(out)
    }

    pub fn coeffs(&self, a: Fe) -> Vec<u64> {
        a.0[..self.k].iter().map(|c| *c as u64).collect()
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let mut out = Fe::ZERO;
        for i in 0..self.k {
            out.0[i] = ((a.0[i] as u64 + b.0[i] as u64) % self.p) as u32;
        }
        out
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        let mut out = Fe::ZERO;
        for i in 0..self.k {
            out.0[i] = ((a.0[i] as u64 + self.p - b.0[i] as u64) % self.p) as u32;
        }
        out
    }

    pub fn neg(&self, a: Fe) -> Fe {
        self.sub(Fe::ZERO, a)
    }

    pub fn scale(&self, c: i64, a: Fe) -> Fe {
        self.mul(self.from_int(c), a)
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let (p, k) = (self.p, self.k);
        if k == 1 {
            return Fe::constant(a.0[0] as u64 * b.0[0] as u64 % p);
        }
        let mut prod = [0u64; 2 * MAX_LEVEL - 1];
        for i in 0..k {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] += a.0[i] as u64 * b.0[j] as u64;
            }
        }
        for v in prod.iter_mut() {
            *v %= p;
        }
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..k {
                let idx = d - k + i;
                prod[idx] = (prod[idx] + c * (p - self.modulus[i])) % p;
            }
        }
        let mut out = Fe::ZERO;
        for i in 0..k {
            out.0[i] = prod[i] as u32;
        }
        out
    }

    pub fn sqr(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Fe, mut e: u128) -> Fe {
        let mut acc = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.sqr(b);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return None;
        }
        if let Some(c) = a.constant_value() {
            return Some(Fe::constant(crate::arith::pow_mod(c, self.p - 2, self.p)));
        }
        Some(self.pow(a, self.size - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// The Frobenius `a ↦ a^p`.
    pub fn frobenius(&self, a: Fe) -> Fe {
        if a.is_constant() {
            return a;
        }
        self.pow(a, self.p as u128)
    }

    pub fn is_square(&self, a: Fe) -> bool {
        a.is_zero() || self.pow(a, (self.size - 1) / 2) == self.one()
    }

    /// A square root (Tonelli–Shanks), or `None` for non-squares.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return Some(a);
        }
        if !self.is_square(a) {
            return None;
        }
        let mut s = 0u32;
        let mut r = self.size - 1;
        while r % 2 == 0 {
            r /= 2;
            s += 1;
        }
        let mut c = self.pow(self.nonresidue, r);
        let mut x = self.pow(a, r.div_ceil(2));
        let mut t = self.pow(a, r);
        let mut m = s;
        while t != self.one() {
            let mut i = 0;
            let mut tt = t;
            while tt != self.one() {
                tt = self.sqr(tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..m - i - 1 {
                b = self.sqr(b);
            }
            x = self.mul(x, b);
            c = self.sqr(b);
            t = self.mul(t, c);
            m = i;
        }
        Some(x)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        let mut out = Fe::ZERO;
        for c in out.0.iter_mut().take(self.k) {
            *c = rng.gen_range(0..self.p) as u32;
        }
        out
    }

    /// Multiplicative order of a nonzero element, given a multiple of it.
    pub fn order_dividing(&self, a: Fe, multiple: u128) -> u128 {
        let mut n = multiple;
        for (l, _) in crate::arith::factor128(multiple) {
            while n % l == 0 && self.pow(a, n / l) == self.one() {
                n /= l;
            }
        }
        n
    }
}
