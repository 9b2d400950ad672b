//! Imaginary quadratic orders, their proper ideals, binary quadratic forms and
//! class groups.
//!
//! An order of discriminant `D` is written `Z + Zω` where `ω` is the root of
//! `x² − t·x + n` with `t = D mod 2` and `n = (t − D)/4`. Elements are stored as
//! coordinate pairs `(x, y)` meaning `x + yω`.

mod classgroup;
mod form;
mod ideal;

pub use classgroup::{class_group, class_group_coprime, class_number, class_of, IdealClass};
pub use form::BQForm;
pub use ideal::{ideals_of_norm, splitting_type, FracIdeal, QuadIdeal, SplitType};

use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_square, narrow};
use crate::error::{domain, Result};

/// An element `x + yω` of an order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem {
    pub x: i64,
    pub y: i64,
}

impl Elem {
    pub const fn new(x: i64, y: i64) -> Self {
        Elem { x, y }
    }
    pub const fn int(x: i64) -> Self {
        Elem { x, y: 0 }
    }
    pub const ONE: Elem = Elem { x: 1, y: 0 };
    pub const OMEGA: Elem = Elem { x: 0, y: 1 };
}

/// An imaginary quadratic order `O = Z[ω]` of discriminant `disc`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadOrder {
    pub disc: i64,
    pub omega_trace: i64,
    pub omega_norm: i64,
    /// Conductor relative to the maximal order.
    pub cond: i64,
    pub fund_disc: i64,
}

fn is_disc(d: i64) -> bool {
    d < 0 && matches!(d.rem_euclid(4), 0 | 1)
}

/// Builds the order of discriminant `d`, factoring out its conductor.
pub fn order_from_disc(d: i64) -> Result<QuadOrder> {
    if !is_disc(d) {
        return domain(format!("{d} is not a negative discriminant (≡ 0, 1 mod 4)"));
    }
    let mut fund = d;
    let mut cond = 1i64;
    for (p, _) in factor(d.unsigned_abs()) {
        let p = p as i64;
        while fund % (p * p) == 0 && is_disc(fund / (p * p)) {
            fund /= p * p;
            cond *= p;
        }
    }
    let t = d.rem_euclid(2);
    Ok(QuadOrder { disc: d, omega_trace: t, omega_norm: (t - d) / 4, cond, fund_disc: fund })
}

impl QuadOrder {
    /// The suborder `Z + fO` of relative conductor `f`.
    pub fn suborder(&self, f: i64) -> Result<QuadOrder> {
        let d = (self.disc as i128) * (f as i128) * (f as i128);
        order_from_disc(narrow(d, "suborder discriminant")?)
    }

    /// Writes `ω'` of the suborder `Z + fO` in the basis of `self`: `ω' = k + fω`.
    pub fn suborder_omega(&self, f: i64) -> Elem {
        let tp = (self.disc * f * f).rem_euclid(2);
        Elem::new((tp - f * self.omega_trace) / 2, f)
    }

    pub fn mul(&self, u: Elem, v: Elem) -> Result<Elem> {
        let (t, n) = (self.omega_trace as i128, self.omega_norm as i128);
        let (x1, y1, x2, y2) = (u.x as i128, u.y as i128, v.x as i128, v.y as i128);
        let x = x1 * x2 - n * y1 * y2;
        let y = x1 * y2 + x2 * y1 + t * y1 * y2;
        Ok(Elem::new(narrow(x, "element product")?, narrow(y, "element product")?))
    }

    pub fn add(&self, u: Elem, v: Elem) -> Elem {
        Elem::new(u.x + v.x, u.y + v.y)
    }

    pub fn scale(&self, k: i64, u: Elem) -> Elem {
        Elem::new(k * u.x, k * u.y)
    }

    pub fn conj(&self, u: Elem) -> Elem {
        Elem::new(u.x + self.omega_trace * u.y, -u.y)
    }

    pub fn norm(&self, u: Elem) -> i128 {
        let (x, y) = (u.x as i128, u.y as i128);
        x * x + self.omega_trace as i128 * x * y + self.omega_norm as i128 * y * y
    }

    pub fn trace(&self, u: Elem) -> i64 {
        2 * u.x + self.omega_trace * u.y
    }

    /// All elements of norm exactly `n`.
    pub fn elements_of_norm(&self, n: i128) -> Vec<Elem> {
        let mut out = Vec::new();
        if n < 0 {
            return out;
        }
        if n == 0 {
            out.push(Elem::new(0, 0));
            return out;
        }
        let absd = (-self.disc) as i128;
        let t = self.omega_trace as i128;
        // 4n = (2x + ty)^2 + |D| y^2
        let ymax = crate::arith::isqrt((4 * n / absd) as u128) as i128;
        for y in -ymax..=ymax {
            let rest = 4 * n - absd * y * y;
            if let Some(s) = is_square(rest) {
                let mut cands = vec![s];
                if s != 0 {
                    cands.push(-s);
                }
                for s in cands {
                    let twice = s - t * y;
                    if twice % 2 == 0 {
                        out.push(Elem::new((twice / 2) as i64, y as i64));
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// The unit group `O^×`.
    pub fn units(&self) -> Vec<Elem> {
        self.elements_of_norm(1)
    }

    /// Index `[O : Z + (cond)O_K]`-compatible check that an integer is coprime to the conductor.
    pub fn coprime_to_cond(&self, n: i64) -> bool {
        crate::arith::gcd(n, self.cond) == 1
    }
}
