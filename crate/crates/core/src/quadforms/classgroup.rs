use serde::{Deserialize, Serialize};

use super::form::reduced_forms;
use super::{BQForm, QuadIdeal, QuadOrder};
use crate::arith::{gcd, xgcd};
use crate::error::Result;

/// An ideal class, identified by its reduced form and carrying an integral representative.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IdealClass {
    pub form: BQForm,
    pub rep: QuadIdeal,
}

impl PartialEq for IdealClass {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form
    }
}
impl Eq for IdealClass {}

/// Reduced form of the class of a proper ideal.
pub fn class_of(o: &QuadOrder, ideal: &QuadIdeal) -> Result<BQForm> {
    if !ideal.is_proper(o) {
        return Err(crate::error::Error::NotProper(format!("{ideal:?}")));
    }
    Ok(ideal.to_form(o).reduce())
}

pub fn class_number(o: &QuadOrder) -> usize {
    reduced_forms(o.disc).len()
}

/// Class group of `O`, with representatives whose norms are coprime to the conductor.
pub fn class_group(o: &QuadOrder) -> Vec<IdealClass> {
    class_group_coprime(o, 1)
}

/// Class group of `O` with integral representatives of norm coprime to `m·cond`.
pub fn class_group_coprime(o: &QuadOrder, m: i64) -> Vec<IdealClass> {
    let bad = m.abs().max(1) * o.cond;
    reduced_forms(o.disc)
        .into_iter()
        .map(|f| {
            let rep = coprime_rep(o, &f, bad);
            IdealClass { form: f, rep }
        })
        .collect()
}

/// Finds a form equivalent to `f` whose leading coefficient is coprime to `bad`,
/// scanning primitive vectors `(x, y)` by increasing size.
fn coprime_rep(o: &QuadOrder, f: &BQForm, bad: i64) -> QuadIdeal {
    let mut r = 1i64;
    loop {
        for x in -r..=r {
            for y in 0..=r {
                if x.abs().max(y) != r || gcd(x, y) != 1 || (y == 0 && x < 0) {
                    continue;
                }
                let v = f.eval(x, y);
                if v <= 0 || gcd(v as i64, bad) != 1 {
                    continue;
                }
                // complete (x, y) to a matrix of determinant 1: x·w − y·z = 1
                let (_, s, t) = xgcd(x as i128, y as i128);
                let (z, w) = (-(t as i64), s as i64);
                let g = f.transform(x, y, z, w);
                return QuadIdeal::from_form(o, &g).expect("same discriminant");
            }
        }
        r += 1;
    }
}
