use serde::{Deserialize, Serialize};

use crate::arith::gcd;

/// A positive definite binary quadratic form `a·x² + b·xy + c·y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BQForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BQForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BQForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let BQForm { a, b, c } = *self;
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (a, b, c, x, y) = (self.a as i128, self.b as i128, self.c as i128, x as i128, y as i128);
        a * x * x + b * x * y + c * y * y
    }

    /// Gauss reduction to the unique reduced form in the proper equivalence class.
    pub fn reduce(&self) -> BQForm {
        let d = self.disc() as i128;
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            if b > a || b <= -a {
                // bring b into (-a, a]
                let k = (a - b).div_euclid(2 * a);
                b += 2 * k * a;
                c = (b * b - d) / (4 * a);
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        BQForm::new(a as i64, b as i64, c as i64)
    }

    /// Applies the unimodular substitution `(X, Y) ↦ (xX + zY, yX + wY)`.
    pub fn transform(&self, x: i64, y: i64, z: i64, w: i64) -> BQForm {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (x, y, z, w) = (x as i128, y as i128, z as i128, w as i128);
        let na = a * x * x + b * x * y + c * y * y;
        let nb = 2 * a * x * z + b * (x * w + y * z) + 2 * c * y * w;
        let nc = a * z * z + b * z * w + c * w * w;
        BQForm::new(na as i64, nb as i64, nc as i64)
    }
}

/// All reduced primitive forms of discriminant `d`, by direct enumeration
/// over `|b| ≤ a ≤ √(|D|/3)`.
pub fn reduced_forms(d: i64) -> Vec<BQForm> {
    let mut out = Vec::new();
    let absd = -d;
    let mut a = 1i64;
    while 3 * a * a <= absd {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = BQForm::new(a, b, c);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_form_lists() {
        assert_eq!(reduced_forms(-4), vec![BQForm::new(1, 0, 1)]);
        assert_eq!(reduced_forms(-15), vec![BQForm::new(1, 1, 4), BQForm::new(2, 1, 2)]);
        assert_eq!(reduced_forms(-44), vec![BQForm::new(1, 0, 11), BQForm::new(3, -2, 4), BQForm::new(3, 2, 4)]);
    }

    #[test]
    fn reduction_is_idempotent_and_lands_in_list() {
        for d in [-23i64, -44, -71, -84, -396] {
            let list = reduced_forms(d);
            for f in &list {
                for (x, y, z, w) in [(1, 1, 0, 1), (2, 1, 1, 1), (1, 0, 3, 1), (3, 2, 1, 1)] {
                    let g = f.transform(x, y, z, w);
                    assert_eq!(g.disc(), d);
                    assert_eq!(g.reduce(), *f);
                }
            }
        }
    }
}
