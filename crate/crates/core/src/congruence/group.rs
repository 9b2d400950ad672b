//! Congruence subgroups `P_{O,Λ}(m)` and generalized class groups `I_O(m)/P_{O,Λ}(m)`.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::audit::predicted_order;
use super::lambda::{delta, LambdaSet};
use super::residue::Modulus;
use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::quadforms::{
    class_group_coprime, class_of, ideals_of_norm, Elem, FracIdeal, IdealClass, QuadIdeal, QuadOrder,
};

/// Membership data for `P_{O,Λ}(m)`: the order, modulus, and `Δ`.
#[derive(Clone, Debug)]
pub struct Congruence {
    pub order: QuadOrder,
    pub modulus: Modulus,
    pub lambda: LambdaSet,
    pub delta: BTreeSet<Elem>,
    units: Vec<Elem>,
}

impl Congruence {
    pub fn new(o: &QuadOrder, m: &Modulus, lambda: LambdaSet) -> Self {
        Self::with_delta(o, m, lambda, delta(o, m, lambda))
    }

    pub(crate) fn with_delta(o: &QuadOrder, m: &Modulus, lambda: LambdaSet, delta: BTreeSet<Elem>) -> Self {
        Congruence { order: *o, modulus: m.clone(), lambda, delta, units: o.units() }
    }

    fn require_coprime(&self, x: &QuadIdeal) -> Result<()> {
        x.check(&self.order)?;
        if !x.is_coprime_to(&self.order, &self.modulus.ideal) {
            return Err(Error::NotCoprime(format!("{x:?} is not coprime to the modulus {:?}", self.modulus.ideal)));
        }
        Ok(())
    }

    /// `αO` with `α` given, tested against `u·α ≡ d·λ (mod m)`.
    fn generator_matches(&self, alpha: Elem, d: i64) -> bool {
        let (o, m) = (&self.order, &self.modulus);
        let targets: BTreeSet<Elem> = self.delta.iter().map(|l| m.mul(o, Elem::int(d), *l)).collect();
        self.units.iter().any(|u| targets.contains(&m.mul(o, *u, alpha)))
    }

    /// Whether `x ∈ P_{O,Λ}(m)`. Non-principal ideals are not members.
    pub fn contains(&self, x: &FracIdeal) -> Result<bool> {
        self.require_coprime(&x.num)?;
        if gcd(x.den, self.modulus.norm) != 1 {
            return Err(Error::NotCoprime(format!("denominator {} shares a factor with N(m)", x.den)));
        }
        Ok(match x.num.principal_generator(&self.order) {
            Some(alpha) => self.generator_matches(alpha, x.den),
            None => false,
        })
    }

    /// Whether `x` and `y` define the same class in `I_O(m)/P_{O,Λ}(m)`.
    /// Both norms must be coprime to `N(m)`.
    pub fn equivalent(&self, x: &QuadIdeal, y: &QuadIdeal) -> Result<bool> {
        let o = &self.order;
        for z in [x, y] {
            self.require_coprime(z)?;
            if gcd(z.norm(), self.modulus.norm) != 1 {
                return Err(Error::NotCoprime(format!("N({z:?}) shares a factor with N(m)")));
            }
        }
        if class_of(o, x)? != class_of(o, y)? {
            return Ok(false);
        }
        let q = FracIdeal::new(x.mul(o, &y.conj(o))?, y.norm())?;
        self.contains(&q)
    }
}

/// Free-function form of [`Congruence::contains`].
pub fn in_congruence_subgroup(o: &QuadOrder, x: &FracIdeal, lambda: LambdaSet, m: &Modulus) -> Result<bool> {
    Congruence::new(o, m, lambda).contains(x)
}

type Key = (usize, Elem);

/// `Cl_H = I_O(m)/P_{O,Λ}(m)` with integral representatives and a Cayley table.
#[derive(Clone, Debug)]
pub struct GenClassGroup {
    pub order: QuadOrder,
    pub modulus: Modulus,
    pub lambda: LambdaSet,
    pub elements: Vec<QuadIdeal>,
    pub identity: usize,
    pub cayley: Vec<Vec<usize>>,
    /// `Cl_O` with representatives of norm coprime to `N(m)`.
    pub base_classes: Vec<IdealClass>,
    keys: Vec<Key>,
    lookup: HashMap<Key, usize>,
    fold: Vec<Elem>,
}

impl GenClassGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn key(&self, x: &QuadIdeal) -> Result<Key> {
        key_of(&self.order, &self.modulus, &self.base_classes, &self.fold, x)
    }

    /// Index of the class of an ideal coprime to `m`.
    pub fn class_index(&self, x: &QuadIdeal) -> Result<usize> {
        let k = self.key(x)?;
        self.lookup
            .get(&k)
            .copied()
            .ok_or_else(|| Error::Consistency(format!("{x:?} has a class missing from the enumeration")))
    }

    /// Index of the class of `x` in `Cl_O`, as a position in `base_classes`.
    pub fn base_class(&self, i: usize) -> usize {
        self.keys[i].0
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.cayley[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        (0..self.len()).find(|&j| self.cayley[i][j] == self.identity).expect("group has inverses")
    }

    pub fn pow(&self, i: usize, mut e: u64) -> usize {
        let (mut acc, mut base) = (self.identity, i);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut k = 1;
        let mut acc = i;
        while acc != self.identity {
            acc = self.mul(acc, i);
            k += 1;
        }
        k
    }

    /// Checks closure, identity, inverses and associativity (exhaustive up to 64
    /// elements, on a deterministic sample of triples above that).
    pub fn verify_axioms(&self) -> Result<()> {
        let n = self.len();
        let bad = |what: &str| Err(Error::Consistency(format!("Cayley table violates {what}")));
        for i in 0..n {
            if self.cayley[self.identity][i] != i || self.cayley[i][self.identity] != i {
                return bad("identity");
            }
            let row: BTreeSet<usize> = self.cayley[i].iter().copied().collect();
            if row.len() != n {
                return bad("the latin-square property");
            }
            for j in 0..n {
                if self.cayley[i][j] != self.cayley[j][i] {
                    return bad("commutativity");
                }
            }
        }
        let triples: Vec<(usize, usize, usize)> = if n <= 64 {
            (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k)))).collect()
        } else {
            (0..20_000).map(|t| ((t * 7919) % n, (t * 104_729 + 3) % n, (t * 31 + 11) % n)).collect()
        };
        for (i, j, k) in triples {
            if self.mul(self.mul(i, j), k) != self.mul(i, self.mul(j, k)) {
                return bad("associativity");
            }
        }
        Ok(())
    }

    /// One representative per class among ideals accepted by `pred`, by increasing norm.
    pub fn representatives_where<F: Fn(&QuadIdeal) -> bool>(&self, pred: F) -> Result<Vec<QuadIdeal>> {
        let limit = 16 * enumeration_bound(&self.order, &self.modulus);
        let mut reps: Vec<Option<QuadIdeal>> = vec![None; self.len()];
        let mut missing = self.len();
        for x in coprime_ideals(&self.order, &self.modulus) {
            if missing == 0 {
                break;
            }
            if x.norm() > limit {
                return Err(Error::Budget(format!(
                    "{missing} classes have no admissible representative of norm <= {limit}"
                )));
            }
            if !pred(&x) {
                continue;
            }
            let i = self.class_index(&x)?;
            if reps[i].is_none() {
                reps[i] = Some(x);
                missing -= 1;
            }
        }
        Ok(reps.into_iter().map(|r| r.expect("all classes found")).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            disc: i64,
            modulus: &'a QuadIdeal,
            lambda: String,
            elements: &'a [QuadIdeal],
            identity: usize,
            cayley: &'a [Vec<usize>],
        }
        serde_json::to_value(Doc {
            schema_version: crate::SCHEMA_VERSION,
            disc: self.order.disc,
            modulus: &self.modulus.ideal,
            lambda: self.lambda.to_string(),
            elements: &self.elements,
            identity: self.identity,
            cayley: &self.cayley,
        })
        .expect("serializable")
    }
}

/// `Δ·O^×` as residues modulo `m`.
fn fold_set(o: &QuadOrder, m: &Modulus, delta: &BTreeSet<Elem>) -> Vec<Elem> {
    let set: BTreeSet<Elem> = delta.iter().flat_map(|d| o.units().into_iter().map(move |u| m.mul(o, *d, u))).collect();
    set.into_iter().collect()
}

/// Class key of `x`: its `Cl_O` class and the coset of `α` in `(O/m)^×/(Δ·O^×)`,
/// where `x·conj(r) = αO` for the fixed representative `r` of that class.
fn key_of(o: &QuadOrder, m: &Modulus, base: &[IdealClass], fold: &[Elem], x: &QuadIdeal) -> Result<Key> {
    x.check(o)?;
    if !x.is_coprime_to(o, &m.ideal) {
        return Err(Error::NotCoprime(format!("{x:?} is not coprime to the modulus {:?}", m.ideal)));
    }
    let form = class_of(o, x)?;
    let c = base
        .iter()
        .position(|k| k.form == form)
        .ok_or_else(|| Error::Consistency(format!("form {form:?} missing from the class group")))?;
    let prod = x.mul(o, &base[c].rep.conj(o))?;
    let alpha =
        prod.principal_generator(o).ok_or_else(|| Error::Consistency(format!("{prod:?} should be principal")))?;
    let canon = fold.iter().map(|f| m.mul(o, alpha, *f)).min_by_key(|e| m.index(*e)).expect("fold contains 1");
    Ok((c, canon))
}

/// Integral ideals coprime to `N(m)·cond`, by increasing norm.
pub(crate) fn coprime_ideals(o: &QuadOrder, m: &Modulus) -> impl Iterator<Item = QuadIdeal> {
    let bad = m.norm * o.cond;
    let o = *o;
    (1i64..).filter(move |n| gcd(*n, bad) == 1).flat_map(move |n| ideals_of_norm(&o, n))
}

pub(crate) fn enumeration_bound(o: &QuadOrder, m: &Modulus) -> i64 {
    (6 * o.disc.abs()).max(20 * m.norm)
}

pub fn gen_class_group(o: &QuadOrder, m: &Modulus, lambda: LambdaSet) -> Result<GenClassGroup> {
    build(o, m, lambda, delta(o, m, lambda))
}

pub(crate) fn build(o: &QuadOrder, m: &Modulus, lambda: LambdaSet, delta: BTreeSet<Elem>) -> Result<GenClassGroup> {
    let predicted = predicted_order(o, m, &delta)?.predicted;
    let base = class_group_coprime(o, m.norm);
    let fold = fold_set(o, m, &delta);
    let limit = 16 * enumeration_bound(o, m);

    let mut elements = Vec::new();
    let mut keys = Vec::new();
    let mut lookup = HashMap::new();
    for x in coprime_ideals(o, m) {
        if elements.len() == predicted {
            break;
        }
        if x.norm() > limit {
            return Err(Error::Budget(format!(
                "found {} of {predicted} classes among ideals of norm <= {limit}",
                elements.len()
            )));
        }
        let k = key_of(o, m, &base, &fold, &x)?;
        if let std::collections::hash_map::Entry::Vacant(v) = lookup.entry(k) {
            v.insert(elements.len());
            elements.push(x);
            keys.push(k);
        }
    }
    let n = elements.len();
    let rows: Result<Vec<Vec<usize>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let p = elements[i].mul(o, &elements[j])?;
                    let k = key_of(o, m, &base, &fold, &p)?;
                    lookup
                        .get(&k)
                        .copied()
                        .ok_or_else(|| Error::Consistency(format!("product {p:?} lands outside the enumeration")))
                })
                .collect()
        })
        .collect();
    let g = GenClassGroup {
        order: *o,
        modulus: m.clone(),
        lambda,
        elements,
        identity: 0,
        cayley: rows?,
        base_classes: base,
        keys,
        lookup,
        fold,
    };
    g.verify_axioms()?;
    Ok(g)
}

/// Classes of `Cl_H` mapping to the trivial class of `Cl_O`.
pub fn kernel_of_projection(g: &GenClassGroup) -> Vec<usize> {
    let principal = g.base_class(g.identity);
    (0..g.len()).filter(|&i| g.base_class(i) == principal).collect()
}
