//! Curves with `m`-level structure: the sets `Y_Γ` and `Z_Γ` and the action on them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::action::act_with_points;
use super::kernel::{ideal_kernel, ideal_torsion, is_module_generator};
use super::orientation::{Orientation, OrientedCurve};
use crate::congruence::{delta, LambdaSet, Modulus};
use crate::curvefield::{subgroup, torsion_level, Curve, Point, PointRecord, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::quadforms::{Elem, QuadIdeal, QuadOrder};

/// The subgroup `Γ ⊆ Aut(O/m)` a level structure is taken modulo.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GammaSpec {
    Trivial,
    /// Multiplications `μ_λ` for `λ ∈ Λ` invertible modulo `m`.
    GammaOLambda(LambdaSet),
    /// Automorphisms preserving the cyclic subgroup generated by the first generator.
    Gamma0,
    FullGL,
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaSpec::Trivial => write!(f, "trivial"),
            GammaSpec::GammaOLambda(l) => write!(f, "olambda:{l}"),
            GammaSpec::Gamma0 => write!(f, "gamma0"),
            GammaSpec::FullGL => write!(f, "gl"),
        }
    }
}

impl FromStr for GammaSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(GammaSpec::Trivial),
            "gamma0" => Ok(GammaSpec::Gamma0),
            "gl" => Ok(GammaSpec::FullGL),
            _ => match s.strip_prefix("olambda:") {
                Some(l) => Ok(GammaSpec::GammaOLambda(l.parse()?)),
                None => Err(Error::Parse(format!("unknown Γ tag {s:?} (trivial | olambda:<Λ> | gamma0 | gl)"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// Group isomorphisms `O/m → E[m]`.
    Y,
    /// `O`-module isomorphisms.
    Z,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Y => "Y",
            Flavor::Z => "Z",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Y" | "y" => Ok(Flavor::Y),
            "Z" | "z" => Ok(Flavor::Z),
            _ => Err(Error::Parse(format!("unknown flavor {s:?} (Y | Z)"))),
        }
    }
}

/// An endomorphism of `Z/a_m × Z/b_m`: the images of the two generators in Smith coordinates.
pub type CoordMap = [(i64, i64); 2];

/// Level structure `Φ` on an oriented curve, stored as `(Φ(gen_a), Φ(gen_b))`.
#[derive(Clone, Debug)]
pub struct LevelledCurve {
    pub oc: OrientedCurve,
    pub p: Point,
    pub q: Point,
}

impl LevelledCurve {
    fn key(&self) -> (u64, u64, Point, Point) {
        (self.oc.curve.a, self.oc.curve.b, self.p, self.q)
    }
}

impl PartialEq for LevelledCurve {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for LevelledCurve {}
impl PartialOrd for LevelledCurve {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for LevelledCurve {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}
impl std::hash::Hash for LevelledCurve {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

/// The ambient data of `Y_Γ` / `Z_Γ`: order, modulus, `Γ` in coordinates, and `O^×`.
#[derive(Clone, Debug)]
pub struct LevelSpace {
    pub order: QuadOrder,
    pub modulus: Modulus,
    pub gamma: GammaSpec,
    pub flavor: Flavor,
    gamma_maps: Vec<CoordMap>,
    units: Vec<Elem>,
}

/// Automorphisms of `Z/a × Z/b` (`b | a`).
pub fn group_automorphisms(a: i64, b: i64) -> Result<Vec<CoordMap>> {
    if a * b > 100 {
        return Err(Error::Budget(format!("Aut(Z/{a} × Z/{b}) is too large to enumerate")));
    }
    let elems: Vec<(i64, i64)> = (0..a).flat_map(|x| (0..b).map(move |y| (x, y))).collect();
    let order = |(x, y): (i64, i64)| (1..=a).find(|k| (k * x) % a == 0 && (k * y) % b == 0).expect("finite group");
    let mut out = Vec::new();
    for &g1 in elems.iter().filter(|&&g| order(g) == a) {
        for &g2 in elems.iter().filter(|&&g| a % order(g) == 0 && b % order(g) == 0) {
            let mut seen = BTreeSet::new();
            for i in 0..a {
                for j in 0..b {
                    seen.insert(((i * g1.0 + j * g2.0) % a, (i * g1.1 + j * g2.1) % b));
                }
            }
            if seen.len() as i64 == a * b {
                out.push([g1, g2]);
            }
        }
    }
    Ok(out)
}

impl LevelSpace {
    pub fn new(order: &QuadOrder, modulus: Modulus, gamma: GammaSpec, flavor: Flavor) -> Result<Self> {
        if flavor == Flavor::Z && !matches!(gamma, GammaSpec::Trivial | GammaSpec::GammaOLambda(_)) {
            return Err(Error::Precondition(format!("Z_Γ needs Γ of O-module automorphisms, got {gamma}")));
        }
        let m = &modulus;
        let mult = |l: Elem| [m.coords(order.mul(l, m.gen_a).unwrap()), m.coords(order.mul(l, m.gen_b).unwrap())];
        let gamma_maps = match gamma {
            GammaSpec::Trivial => vec![[(1 % m.a_m, 0), (0, 1 % m.b_m)]],
            GammaSpec::GammaOLambda(l) => {
                let maps: BTreeSet<CoordMap> = delta(order, m, l).into_iter().map(mult).collect();
                maps.into_iter().collect()
            }
            GammaSpec::Gamma0 => group_automorphisms(m.a_m, m.b_m)?.into_iter().filter(|g| g[0].1 == 0).collect(),
            GammaSpec::FullGL => group_automorphisms(m.a_m, m.b_m)?,
        };
        Ok(LevelSpace { order: *order, modulus, gamma, flavor, gamma_maps, units: order.units() })
    }

    pub fn gamma_len(&self) -> usize {
        self.gamma_maps.len()
    }

    fn apply_map(&self, oc: &OrientedCurve, p: &Point, q: &Point, g: &CoordMap) -> (Point, Point) {
        let e = &oc.curve;
        (e.lin(g[0].0 as i128, p, g[0].1 as i128, q), e.lin(g[1].0 as i128, p, g[1].1 as i128, q))
    }

    /// Least representative of the `Γ × ι(O^×)`-orbit of `(P, Q)`.
    pub fn canonicalize(&self, oc: &OrientedCurve, p: Point, q: Point) -> Result<LevelledCurve> {
        let mut best: Option<(Point, Point)> = None;
        for u in &self.units {
            let (up, uq) = (oc.apply(*u, &p)?, oc.apply(*u, &q)?);
            for g in &self.gamma_maps {
                let cand = self.apply_map(oc, &up, &uq, g);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        let (p, q) = best.expect("Γ contains the identity");
        Ok(LevelledCurve { oc: oc.clone(), p, q })
    }

    /// Level at which `E[m]` is taken on curves of this isogeny class.
    pub fn working_level(&self, oc: &OrientedCurve) -> Result<u8> {
        torsion_level(&oc.curve, self.modulus.int_gen() as u64).ok_or(Error::TorsionUnavailable {
            n: self.modulus.int_gen() as u64,
            level: MAX_LEVEL as u8,
            minimal: "none up to 6".into(),
        })
    }

    /// A point `R` with `E[m] = O·R`, chosen deterministically.
    pub fn module_generator(&self, oc: &OrientedCurve) -> Result<Point> {
        let m = &self.modulus;
        if m.norm == 1 {
            return Ok(Point::INFINITY);
        }
        let e = &oc.curve;
        if m.b_m == 1 {
            let pts = subgroup(e, &ideal_kernel(oc, &m.ideal)?)?;
            return pts
                .into_iter()
                .filter(|pt| e.order_dividing(pt, m.a_m as u128) == m.a_m as u128)
                .min()
                .ok_or_else(|| Error::Consistency("E[m] has no point of order a_m".into()));
        }
        let mut pts = ideal_torsion(oc, &m.ideal, self.working_level(oc)?)?;
        pts.sort();
        for pt in pts {
            if is_module_generator(oc, m.norm, &pt)? {
                return Ok(pt);
            }
        }
        Err(Error::Consistency(format!("E[m] has no O-module generator for m = {:?}", m.ideal)))
    }

    /// `Φ_R: r ↦ ι(r)(R)` on the Smith generators.
    pub fn structure_from_generator(&self, oc: &OrientedCurve, r: &Point) -> Result<(Point, Point)> {
        Ok((oc.apply(self.modulus.gen_a, r)?, oc.apply(self.modulus.gen_b, r)?))
    }

    /// `Φ ∘ μ_α`.
    pub fn precompose_mult(&self, lc: &LevelledCurve, alpha: Elem) -> Result<LevelledCurve> {
        let m = &self.modulus;
        let o = &self.order;
        let g = [m.coords(o.mul(alpha, m.gen_a)?), m.coords(o.mul(alpha, m.gen_b)?)];
        let (p, q) = self.apply_map(&lc.oc, &lc.p, &lc.q, &g);
        self.canonicalize(&lc.oc, p, q)
    }

    /// All canonical elements of `Y_Γ` or `Z_Γ` over the given curves.
    pub fn enumerate(&self, curves: &[OrientedCurve]) -> Result<Vec<LevelledCurve>> {
        let m = &self.modulus;
        let maps: Vec<CoordMap> = match self.flavor {
            Flavor::Z => {
                let units = crate::congruence::UnitGroup::new(&self.order, m);
                let mut s = BTreeSet::new();
                for u in &units.elems {
                    s.insert([m.coords(self.order.mul(*u, m.gen_a)?), m.coords(self.order.mul(*u, m.gen_b)?)]);
                }
                s.into_iter().collect()
            }
            Flavor::Y => group_automorphisms(m.a_m, m.b_m)?,
        };
        let mut out = BTreeSet::new();
        for oc in curves {
            let r = self.module_generator(oc)?;
            let (p0, q0) = self.structure_from_generator(oc, &r)?;
            for g in &maps {
                let (p, q) = self.apply_map(oc, &p0, &q0, g);
                out.insert(self.canonicalize(oc, p, q)?);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// `[a] ⋆ (E, Φ) = (a ⋆ E, φ_a ∘ Φ)`, canonicalized.
    pub fn act(&self, a: &QuadIdeal, lc: &LevelledCurve) -> Result<LevelledCurve> {
        if self.flavor == Flavor::Y && self.gamma == GammaSpec::GammaOLambda(LambdaSet::FullOrder) {
            return Err(Error::Precondition("the action on Y_Γ needs Λ ⊆ O^×·Z".into()));
        }
        if !a.is_coprime_to(&self.order, &self.modulus.ideal) {
            return Err(Error::NotCoprime(format!("{a:?} is not coprime to m = {:?}", self.modulus.ideal)));
        }
        let (oc, pts) = act_with_points(&lc.oc, a, &[lc.p, lc.q])?;
        self.canonicalize(&oc, pts[0], pts[1])
    }

    /// `⟨P, Q⟩ = E[m]` with the declared orders.
    pub fn is_level_structure(&self, lc: &LevelledCurve) -> Result<bool> {
        let e = &lc.oc.curve;
        let m = &self.modulus;
        let (a, b) = (m.a_m as u128, m.b_m as u128);
        if e.order_dividing(&lc.p, a) != a || e.order_dividing(&lc.q, b) != b {
            return Ok(false);
        }
        let killed = |pt: &Point| -> Result<bool> {
            let mut in_ker = true;
            for g in [Elem::int(m.ideal.a), Elem::new(m.ideal.b, m.ideal.c)] {
                in_ker &= lc.oc.apply(g, pt)?.inf;
            }
            Ok(in_ker)
        };
        Ok(killed(&lc.p)? && killed(&lc.q)? && subgroup(e, &[lc.p, lc.q])?.len() as i64 == m.norm)
    }

    /// `Φ(ω·r) = ι(ω)Φ(r)` on both generators.
    pub fn is_module_map(&self, lc: &LevelledCurve) -> Result<bool> {
        let m = &self.modulus;
        let o = &self.order;
        for (g, img) in [(m.gen_a, lc.p), (m.gen_b, lc.q)] {
            let (x, y) = m.coords(o.mul(Elem::OMEGA, g)?);
            let lhs = lc.oc.curve.lin(x as i128, &lc.p, y as i128, &lc.q);
            if lhs != lc.oc.sigma(&img)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self, lc: &LevelledCurve) -> serde_json::Value {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            modulus: &'a QuadIdeal,
            gamma: String,
            flavor: String,
            orientation: &'a Orientation,
            j: u64,
            #[serde(rename = "P")]
            p: PointRecord,
            #[serde(rename = "Q")]
            q: PointRecord,
        }
        let e: &Curve = &lc.oc.curve;
        serde_json::to_value(Doc {
            schema_version: crate::SCHEMA_VERSION,
            modulus: &self.modulus.ideal,
            gamma: self.gamma.to_string(),
            flavor: self.flavor.to_string(),
            orientation: &lc.oc.orientation,
            j: e.j_invariant(),
            p: e.point_record(&lc.p),
            q: e.point_record(&lc.q),
        })
        .expect("serializable")
    }
}

impl LevelSpace {
    /// Reads a level structure written by [`LevelSpace::to_json`], on one of `curves`.
    pub fn from_json(&self, doc: &serde_json::Value, curves: &[OrientedCurve]) -> Result<LevelledCurve> {
        let rec = |k: &str| -> Result<PointRecord> {
            serde_json::from_value(doc.get(k).cloned().unwrap_or_default())
                .map_err(|e| Error::Parse(format!("{k}: {e}")))
        };
        let (p, q) = (rec("P")?, rec("Q")?);
        let oc = curves
            .iter()
            .find(|c| c.curve.a == p.a && c.curve.b == p.b)
            .ok_or_else(|| Error::NoSolution(format!("no curve with (A, B) = ({}, {}) in this scenario", p.a, p.b)))?;
        let (p, q) = (oc.curve.point_from_record(&p)?, oc.curve.point_from_record(&q)?);
        let lc = self.canonicalize(oc, p, q)?;
        if !self.is_level_structure(&lc)? {
            return Err(Error::Domain("points do not form an m-level structure".into()));
        }
        Ok(lc)
    }
}

/// Free-function form of [`LevelSpace::enumerate`].
pub fn enumerate_levelled(
    curves: &[OrientedCurve],
    m: Modulus,
    gamma: GammaSpec,
    flavor: Flavor,
) -> Result<(LevelSpace, Vec<LevelledCurve>)> {
    let order = curves.first().map(|c| c.order).ok_or_else(|| Error::Precondition("no curves".into()))?;
    let space = LevelSpace::new(&order, m, gamma, flavor)?;
    let set = space.enumerate(curves)?;
    Ok((space, set))
}

/// Free-function form of [`LevelSpace::act`].
pub fn act_on_levelled(space: &LevelSpace, a: &QuadIdeal, lc: &LevelledCurve) -> Result<LevelledCurve> {
    space.act(a, lc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::gen_class_group;
    use crate::curvefield::{supersingular_floor_set, Tower};

    fn floor11() -> Vec<OrientedCurve> {
        supersingular_floor_set(11)
            .unwrap()
            .into_iter()
            .map(|e| OrientedCurve::from_frobenius(e, -44).unwrap())
            .collect()
    }

    fn gaussian13() -> OrientedCurve {
        let t = Tower::new(13).unwrap();
        let e = (1..13).map(|c| Curve::new(&t, c, 0).unwrap()).find(|e| e.trace() == 4).unwrap();
        OrientedCurve::from_frobenius(e.canonical().0, -4).unwrap()
    }

    /// Module generators of `E[m]` folded by `±1`, by scanning every point of `E[3]`.
    fn scan_count(curves: &[OrientedCurve], fold: usize) -> usize {
        let mut total = 0;
        for oc in curves {
            let pts = oc.curve.all_points(2).unwrap();
            let gens = pts
                .iter()
                .filter(|p| oc.curve.mul(3, p).inf && !p.inf)
                .filter(|p| {
                    let s = oc.sigma(p).unwrap();
                    subgroup(&oc.curve, &[**p, s]).unwrap().len() == 9
                })
                .count();
            total += gens / fold;
        }
        total
    }

    #[test]
    fn ray_class_level_set_on_floor() {
        let curves = floor11();
        let o = curves[0].order;
        let m = Modulus::scalar(&o, 3).unwrap();
        let (space, z) =
            enumerate_levelled(&curves, m.clone(), GammaSpec::GammaOLambda(LambdaSet::UnitOnly), Flavor::Z).unwrap();
        assert_eq!(z.len(), 6);
        assert_eq!(z.len(), scan_count(&curves, 2));
        for lc in &z {
            assert!(space.is_level_structure(lc).unwrap());
            assert!(space.is_module_map(lc).unwrap());
        }
        let (_, full) =
            enumerate_levelled(&curves, m.clone(), GammaSpec::GammaOLambda(LambdaSet::FullOrder), Flavor::Z).unwrap();
        assert_eq!(full.len(), 3);
        let (_, y) = enumerate_levelled(&curves, m.clone(), GammaSpec::Trivial, Flavor::Y).unwrap();
        assert_eq!(y.len(), 3 * 48 / 2);
        let (_, gl) = enumerate_levelled(&curves, m, GammaSpec::FullGL, Flavor::Y).unwrap();
        assert_eq!(gl.len(), 3);
    }

    #[test]
    fn gaussian_surface_folds_units() {
        let oc = gaussian13();
        let o = oc.order;
        let m = Modulus::scalar(&o, 3).unwrap();
        let (_, z) =
            enumerate_levelled(&[oc.clone()], m.clone(), GammaSpec::GammaOLambda(LambdaSet::Integers), Flavor::Z)
                .unwrap();
        assert_eq!(z.len(), 2);
        // 3 is inert: all 8 nonzero points generate; Λ = Z folds ±1, ι(i) folds the rest in pairs
        let (_, z1) = enumerate_levelled(&[oc], m, GammaSpec::GammaOLambda(LambdaSet::UnitOnly), Flavor::Z).unwrap();
        assert_eq!(z1.len(), 2);
    }

    #[test]
    fn action_is_free_and_transitive() {
        let curves = floor11();
        let o = curves[0].order;
        let m = Modulus::scalar(&o, 3).unwrap();
        let g = gen_class_group(&o, &m, LambdaSet::UnitOnly).unwrap();
        let (space, z) =
            enumerate_levelled(&curves, m, GammaSpec::GammaOLambda(LambdaSet::UnitOnly), Flavor::Z).unwrap();
        assert_eq!(g.len(), z.len());
        let x = &z[0];
        let reps = g.representatives_where(|a| crate::oriented::is_actionable(&x.oc, a)).unwrap();
        let orbit: BTreeSet<LevelledCurve> = reps.iter().map(|a| space.act(a, x).unwrap()).collect();
        assert_eq!(orbit.len(), z.len());
        assert_eq!(space.act(&reps[g.identity], x).unwrap(), *x);
        // Eq. (2): a principal ideal moves only the level structure
        let (alpha, a) = (1..40)
            .flat_map(|x| (1..6).map(move |y| Elem::new(x, y)))
            .map(|al| (al, QuadIdeal::from_generators(&o, &[al]).unwrap()))
            .find(|(_, a)| a.is_coprime_to(&o, &space.modulus.ideal) && crate::oriented::is_actionable(&x.oc, a))
            .unwrap();
        let moved = space.act(&a, x).unwrap();
        assert_eq!(moved, space.precompose_mult(x, alpha).unwrap());
        assert_eq!(moved.oc, x.oc);
        assert_ne!(moved, *x);
    }

    #[test]
    fn y_action_needs_small_lambda() {
        let curves = floor11();
        let o = curves[0].order;
        let m = Modulus::scalar(&o, 3).unwrap();
        let space = LevelSpace::new(&o, m, GammaSpec::GammaOLambda(LambdaSet::FullOrder), Flavor::Y).unwrap();
        let lc = space.enumerate(&curves).unwrap().remove(0);
        let a = QuadIdeal::from_generators(&o, &[Elem::new(2, 1)]).unwrap();
        assert!(matches!(space.act(&a, &lc), Err(Error::Precondition(_))));
        assert!(LevelSpace::new(&o, space.modulus.clone(), GammaSpec::FullGL, Flavor::Z).is_err());
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(group_automorphisms(3, 3).unwrap().len(), 48);
        assert_eq!(group_automorphisms(9, 1).unwrap().len(), 6);
        assert_eq!(group_automorphisms(4, 2).unwrap().len(), 8);
        assert_eq!(group_automorphisms(5, 5).unwrap().len(), 480);
    }
}
