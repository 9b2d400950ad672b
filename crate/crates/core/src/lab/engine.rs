//! Action tables of `Cl_H` on an enumerated level-structure set, built from a few
//! prime generators.

use std::collections::{BTreeMap, VecDeque};

use crate::arith::{gcd, is_prime};
use crate::congruence::GenClassGroup;
use crate::error::{Error, Result};
use crate::oriented::{is_actionable, LevelSpace, LevelledCurve, OrientedCurve};
use crate::quadforms::{splitting_type, QuadIdeal, SplitType};

/// Largest prime tried when looking for generators.
pub const GENERATOR_PRIME_BOUND: i64 = 400;

#[derive(Clone, Debug)]
pub struct ActionEngine {
    pub space: LevelSpace,
    pub group: GenClassGroup,
    pub set: Vec<LevelledCurve>,
    index: BTreeMap<LevelledCurve, usize>,
    /// Prime ideals and their classes.
    pub generators: Vec<(QuadIdeal, usize)>,
    /// `transitions[g][x]`, `None` when the image fell outside the set.
    pub transitions: Vec<Vec<Option<usize>>>,
    /// `table[c][x]` for every class `c`.
    table: Vec<Vec<Option<usize>>>,
}

/// Small prime ideals, one per class as long as they enlarge the generated subgroup.
pub fn choose_generators(g: &GenClassGroup, sample: &OrientedCurve) -> Result<Vec<(QuadIdeal, usize)>> {
    let o = &g.order;
    let bad = g.modulus.norm * o.cond * sample.curve.p() as i64;
    let mut gens = Vec::new();
    let mut reached = vec![false; g.len()];
    reached[g.identity] = true;
    let mut count = 1;
    for l in (2..=GENERATOR_PRIME_BOUND).filter(|&l| is_prime(l as u64) && gcd(l, bad) == 1) {
        if count == g.len() {
            break;
        }
        let primes = match splitting_type(o, l)? {
            SplitType::Split(p, q) => vec![p, q],
            SplitType::Inert(p) | SplitType::Ramified(p) => vec![p],
        };
        for p in primes {
            if !is_actionable(sample, &p) {
                continue;
            }
            let c = g.class_index(&p)?;
            if reached[c] {
                continue;
            }
            gens.push((p, c));
            let closure = subgroup_closure(g, gens.iter().map(|x| x.1));
            reached = closure;
            count = reached.iter().filter(|&&r| r).count();
        }
    }
    if count != g.len() {
        return Err(Error::Budget(format!(
            "prime ideals of norm <= {GENERATOR_PRIME_BOUND} generate only {count} of {} classes",
            g.len()
        )));
    }
    Ok(gens)
}

fn subgroup_closure(g: &GenClassGroup, gens: impl Iterator<Item = usize>) -> Vec<bool> {
    let gens: Vec<usize> = gens.collect();
    let mut seen = vec![false; g.len()];
    seen[g.identity] = true;
    let mut queue = VecDeque::from([g.identity]);
    while let Some(c) = queue.pop_front() {
        for &s in &gens {
            let d = g.mul(c, s);
            if !seen[d] {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    seen
}

impl ActionEngine {
    /// Acts with every generator on every element; `raw` skips canonicalization
    /// (a deliberately broken action, used as a negative control).
    pub fn build(space: LevelSpace, group: GenClassGroup, set: Vec<LevelledCurve>, raw: bool) -> Result<Self> {
        let sample = &set.first().ok_or_else(|| Error::Precondition("empty level-structure set".into()))?.oc;
        let generators = choose_generators(&group, sample)?;
        let index: BTreeMap<LevelledCurve, usize> = set.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let mut transitions = Vec::new();
        for (p, _) in &generators {
            let row: Result<Vec<Option<usize>>> = set
                .iter()
                .map(|x| {
                    let y = if raw {
                        let (oc, pts) = crate::oriented::act_with_points(&x.oc, p, &[x.p, x.q])?;
                        LevelledCurve { oc, p: pts[0], q: pts[1] }
                    } else {
                        space.act(p, x)?
                    };
                    Ok(index.get(&y).copied())
                })
                .collect();
            transitions.push(row?);
        }
        let mut engine = ActionEngine { space, group, set, index, generators, transitions, table: Vec::new() };
        engine.fill_table();
        Ok(engine)
    }

    /// Breadth-first over the Cayley graph of the generators.
    fn fill_table(&mut self) {
        let g = &self.group;
        let n = self.set.len();
        let mut table: Vec<Option<Vec<Option<usize>>>> = vec![None; g.len()];
        table[g.identity] = Some((0..n).map(Some).collect());
        let mut queue = VecDeque::from([g.identity]);
        while let Some(c) = queue.pop_front() {
            for (k, (_, s)) in self.generators.iter().enumerate() {
                let d = g.mul(c, *s);
                if table[d].is_some() {
                    continue;
                }
                let row = table[c]
                    .as_ref()
                    .expect("visited")
                    .iter()
                    .map(|x| x.and_then(|x| self.transitions[k][x]))
                    .collect();
                table[d] = Some(row);
                queue.push_back(d);
            }
        }
        self.table = table.into_iter().map(|r| r.unwrap_or_else(|| vec![None; n])).collect();
    }

    pub fn position(&self, x: &LevelledCurve) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// `c ⋆ set[x]`, as a position.
    pub fn act_index(&self, c: usize, x: usize) -> Option<usize> {
        self.table[c][x]
    }

    pub fn act(&self, c: usize, x: &LevelledCurve) -> Result<LevelledCurve> {
        let i = self.position(x).ok_or_else(|| Error::Precondition("element outside the enumerated set".into()))?;
        self.act_index(c, i)
            .map(|j| self.set[j].clone())
            .ok_or_else(|| Error::Consistency(format!("class {c} sends element {i} outside the set")))
    }
}
