//! Multiplicative sets `Λ ⊆ O` and the subgroup `Δ = φ(Λ) ∩ (O/m)^×`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::residue::{Modulus, UnitGroup};
use crate::error::{Error, Result};
use crate::quadforms::{Elem, QuadOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LambdaSet {
    /// `Λ = {1}`
    UnitOnly,
    /// `Λ = Z`
    Integers,
    /// `Λ = {k^n : k ∈ Z}`
    IntegerPowers(u32),
    /// `Λ = O`
    FullOrder,
}

impl fmt::Display for LambdaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSet::UnitOnly => write!(f, "one"),
            LambdaSet::Integers => write!(f, "int"),
            LambdaSet::IntegerPowers(n) => write!(f, "pow:{n}"),
            LambdaSet::FullOrder => write!(f, "full"),
        }
    }
}

impl FromStr for LambdaSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(LambdaSet::UnitOnly),
            "int" => Ok(LambdaSet::Integers),
            "full" => Ok(LambdaSet::FullOrder),
            _ => match s.strip_prefix("pow:").map(str::parse::<u32>) {
                Some(Ok(n)) if n >= 1 => Ok(LambdaSet::IntegerPowers(n)),
                _ => Err(Error::Parse(format!("unknown lambda tag `{s}` (expected one|int|pow:N|full)"))),
            },
        }
    }
}

/// Closes a set of residues under multiplication modulo `m`.
pub(crate) fn closure(o: &QuadOrder, m: &Modulus, gens: &[Elem]) -> BTreeSet<Elem> {
    let mut set: BTreeSet<Elem> = BTreeSet::new();
    set.insert(m.reduce(Elem::ONE));
    let mut frontier: Vec<Elem> = set.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = m.mul(o, x, *g);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

/// The subgroup `Δ ⊆ (O/m)^×` generated by the residues of `Λ` coprime to `m`.
pub fn delta(o: &QuadOrder, m: &Modulus, lambda: LambdaSet) -> BTreeSet<Elem> {
    let n = m.int_gen();
    let int_units = (1..=n).filter(|k| m.int_is_unit(*k));
    let gens: Vec<Elem> = match lambda {
        LambdaSet::UnitOnly => vec![],
        LambdaSet::Integers => int_units.map(|k| m.reduce(Elem::int(k))).collect(),
        LambdaSet::IntegerPowers(e) => int_units
            .map(|k| {
                let g = m.reduce(Elem::int(k));
                (1..e).fold(g, |acc, _| m.mul(o, acc, g))
            })
            .collect(),
        LambdaSet::FullOrder => UnitGroup::new(o, m).elems,
    };
    closure(o, m, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::order_from_disc;

    #[test]
    fn parse_roundtrip() {
        for l in [LambdaSet::UnitOnly, LambdaSet::Integers, LambdaSet::IntegerPowers(2), LambdaSet::FullOrder] {
            assert_eq!(l.to_string().parse::<LambdaSet>().unwrap(), l);
        }
        assert!("pow:0".parse::<LambdaSet>().is_err());
        assert!("nope".parse::<LambdaSet>().is_err());
    }

    #[test]
    fn delta_sizes() {
        let o = order_from_disc(-4).unwrap();
        let m = Modulus::scalar(&o, 3).unwrap();
        assert_eq!(delta(&o, &m, LambdaSet::UnitOnly).len(), 1);
        assert_eq!(delta(&o, &m, LambdaSet::Integers).len(), 2);
        assert_eq!(delta(&o, &m, LambdaSet::IntegerPowers(2)).len(), 1);
        assert_eq!(delta(&o, &m, LambdaSet::FullOrder).len(), 8);
        // 5 inert in Z[√−2]: squares of F_5^× have two elements
        let o = order_from_disc(-8).unwrap();
        let m = Modulus::scalar(&o, 5).unwrap();
        assert_eq!(delta(&o, &m, LambdaSet::IntegerPowers(2)).len(), 2);
    }
}
