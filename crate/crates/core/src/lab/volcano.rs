//! A two-level `f`-isogeny volcano over `F_q`, the suborder correspondence
//! `Z_Γ → Ell(Z + fO)` and the ideals `a_{α,β}`.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use super::certificate::{Certificate, Scenario};
use crate::arith::{gcd, is_prime};
use crate::congruence::{gen_class_group, kernel_of_projection, suborder_transport, LambdaSet, Modulus};
use crate::curvefield::{subgroup, torsion_basis, torsion_level, velu, Curve, Point, Tower};
use crate::error::{Error, Result};
use crate::oriented::{
    act_on_curve, descending_kernels, is_actionable, Flavor, GammaSpec, LevelSpace, LevelledCurve, Orientation,
    OrientedCurve,
};
use crate::quadforms::{class_of, ideals_of_norm, order_from_disc, BQForm, Elem, QuadIdeal, QuadOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    Horizontal,
    Descending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    /// Surface curve the isogeny starts from.
    pub from: usize,
    /// Index into the surface or floor list, per `kind`.
    pub to: usize,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug)]
pub struct VolcanoInstance {
    pub q: u64,
    pub t: i64,
    pub f: i64,
    pub surface_order: QuadOrder,
    pub floor_order: QuadOrder,
    pub surface: Vec<OrientedCurve>,
    pub floor: Vec<OrientedCurve>,
    pub edges: Vec<Edge>,
}

/// Whether the orientation `(u + vπ)/w` is an endomorphism of `e`, i.e. `u + vπ` kills `E[w]`.
pub fn admits_orientation(e: &Curve, o: &Orientation) -> bool {
    let w = o.w as u64;
    if w == 1 {
        return true;
    }
    let Some(level) = torsion_level(e, w) else { return false };
    let Ok((p, q)) = torsion_basis(e, w, level) else { return false };
    [p, q].iter().all(|pt| e.add(&e.mul(o.u as i128, pt), &e.mul(o.v as i128, &e.frobenius(pt))).inf)
}

/// Builds the volcano by exhaustive enumeration of curves with trace `t` over `F_q`.
pub fn build_volcano(q: u64, t: i64, f: i64) -> Result<VolcanoInstance> {
    if !is_prime(q) || q < 5 || q > 200 {
        return Err(Error::Precondition(format!("q = {q} must be a prime in [5, 200]")));
    }
    if !is_prime(f as u64) || f as u64 == q {
        return Err(Error::Precondition(format!("f = {f} must be a prime different from q")));
    }
    let d = t * t - 4 * q as i64;
    if d >= 0 || d % (f * f) != 0 {
        return Err(Error::Precondition(format!("t² − 4q = {d} must be negative and divisible by f²")));
    }
    let floor_order = order_from_disc(d)?;
    let surface_order = order_from_disc(d / (f * f))?;
    let tower = Tower::new(q)?;
    let surf_or = Orientation::from_frobenius(&surface_order, t, q)?;
    let mut curves = BTreeSet::new();
    for a in 0..q as i64 {
        for b in 0..q as i64 {
            if let Ok(e) = Curve::new(&tower, a, b) {
                if e.trace() == t {
                    let c = e.canonical().0;
                    curves.insert((c.a, c.b));
                }
            }
        }
    }
    let (mut surface, mut floor) = (Vec::new(), Vec::new());
    for (a, b) in curves {
        let e = Curve::new(&tower, a as i64, b as i64)?;
        if admits_orientation(&e, &surf_or) {
            surface.push(OrientedCurve::new(e, surf_or)?);
        } else {
            floor.push(OrientedCurve::from_frobenius(e, d)?);
        }
    }
    let mut edges = Vec::new();
    for (i, s) in surface.iter().enumerate() {
        let e = &s.curve;
        let level = torsion_level(e, f as u64).ok_or(Error::TorsionUnavailable {
            n: f as u64,
            level: 6,
            minimal: "none up to 6".into(),
        })?;
        let (p, r) = torsion_basis(e, f as u64, level)?;
        let lines = (0..f).map(|c| e.add(&p, &e.mul(c as i128, &r))).chain(std::iter::once(r));
        for g in lines {
            let c = velu(e, &[g])?.codomain.canonical().0;
            if let Some(j) = surface.iter().position(|x| x.curve == c) {
                edges.push(Edge { from: i, to: j, kind: EdgeKind::Horizontal });
            } else if let Some(j) = floor.iter().position(|x| x.curve == c) {
                edges.push(Edge { from: i, to: j, kind: EdgeKind::Descending });
            } else {
                return Err(Error::Consistency(format!("f-isogenous curve ({}, {}) is not in the volcano", c.a, c.b)));
            }
        }
    }
    Ok(VolcanoInstance { q, t, f, surface_order, floor_order, surface, floor, edges })
}

impl VolcanoInstance {
    /// `π(E, C) = E/C`, oriented by the suborder.
    pub fn quotient(&self, oc: &OrientedCurve, kernel: &Point) -> Result<OrientedCurve> {
        let c = velu(&oc.curve, &[*kernel])?.codomain.canonical().0;
        OrientedCurve::from_frobenius(c, self.floor_order.disc)
    }

    pub fn floor_index(&self, oc: &OrientedCurve) -> Option<usize> {
        self.floor.iter().position(|x| x.curve == oc.curve)
    }

    fn scenario(&self, label: &str, m: (i64, i64, i64)) -> Scenario {
        Scenario {
            label: label.into(),
            q: self.q,
            disc: self.surface_order.disc,
            modulus: m,
            lambda: LambdaSet::Integers.to_string(),
            gamma: GammaSpec::GammaOLambda(LambdaSet::Integers).to_string(),
            flavor: Flavor::Z.to_string(),
        }
    }
}

/// One integral ideal of the suborder per class, of norm coprime to `f·q`, usable on the floor.
fn suborder_reps(vi: &VolcanoInstance) -> Result<Vec<(BQForm, QuadIdeal)>> {
    let o = &vi.floor_order;
    let h = crate::quadforms::class_number(o);
    let bad = vi.f * vi.q as i64 * o.cond;
    let mut reps: Vec<(BQForm, QuadIdeal)> = Vec::new();
    for n in (1..2000).filter(|n| gcd(*n, bad) == 1) {
        for a in ideals_of_norm(o, n) {
            let form = class_of(o, &a)?;
            if !reps.iter().any(|r| r.0 == form) && vi.floor.first().is_some_and(|x| is_actionable(x, &a)) {
                reps.push((form, a));
            }
        }
        if reps.len() == h {
            return Ok(reps);
        }
    }
    Err(Error::Budget(format!("found {} of {h} suborder classes", reps.len())))
}

/// The level-structure side: `Z_Γ` for `m = fO`, `Λ = Z` over the surface.
pub fn surface_level_set(vi: &VolcanoInstance) -> Result<(LevelSpace, Vec<LevelledCurve>)> {
    let o = &vi.surface_order;
    let m = Modulus::scalar(o, vi.f)?;
    let space = LevelSpace::new(o, m, GammaSpec::GammaOLambda(LambdaSet::Integers), Flavor::Z)?;
    let set = space.enumerate(&vi.surface)?;
    Ok((space, set))
}

/// `Φ(1)`, generating the kernel `C` attached to a level structure.
pub fn kernel_of(space: &LevelSpace, x: &LevelledCurve) -> Point {
    let (a, b) = space.modulus.coords(Elem::int(1));
    x.oc.curve.lin(a as i128, &x.p, b as i128, &x.q)
}

/// Checks that `(E, Φ) ↦ E/⟨Φ(1)⟩` is a bijection `Z_Γ → Ell(O')` commuting with the
/// actions through `a ↦ aO`. `misroute` replaces `⟨Φ(1)⟩` by a fixed subgroup.
pub fn suborder_equivalence(vi: &VolcanoInstance, seed: u64, misroute: bool) -> Result<Certificate> {
    let started = Instant::now();
    let (space, set) = surface_level_set(vi)?;
    let mut cert = Certificate::new(vi.scenario("suborder", (vi.f, 0, vi.f)), seed);
    cert.group_order = crate::quadforms::class_number(&vi.floor_order);
    cert.set_size = set.len();
    let pi = |x: &LevelledCurve| -> Result<OrientedCurve> {
        let k = if misroute { descending_kernels(&x.oc, vi.f as u64)?[0] } else { kernel_of(&space, x) };
        vi.quotient(&x.oc, &k)
    };
    let images = set.iter().map(pi).collect::<Result<Vec<_>>>()?;
    cert.record("bijection", {
        let idx: BTreeSet<Option<usize>> = images.iter().map(|c| vi.floor_index(c)).collect();
        if idx.len() == set.len() && idx.len() == vi.floor.len() && !idx.contains(&None) {
            Ok(())
        } else {
            Err(format!("{} level structures hit {} of {} floor curves", set.len(), idx.len(), vi.floor.len()))
        }
    });
    let reps = suborder_reps(vi)?;
    let o = &vi.surface_order;
    cert.record_with("equivariance", || {
        for (form, a) in &reps {
            let ao = a.extend_to(&vi.floor_order, o)?;
            for (x, img) in set.iter().zip(&images) {
                let lhs = act_on_curve(img, a)?;
                let rhs = pi(&space.act(&ao, x)?)?;
                if lhs.curve != rhs.curve {
                    return Ok(Err(format!("class {form:?}: [a] ⋆ π(E, C) ≠ π([aO] ⋆ (E, C))")));
                }
            }
        }
        Ok(Ok(()))
    });
    cert.record_with("transport", || {
        let tr = suborder_transport(o, vi.f)?;
        let g = gen_class_group(o, &space.modulus, LambdaSet::Integers)?;
        Ok(if tr.group.len() == set.len() && g.len() == set.len() {
            Ok(())
        } else {
            Err(format!("|Cl_O'| = {}, |Cl_H| = {}, |Z_Γ| = {}", tr.group.len(), g.len(), set.len()))
        })
    });
    cert.finish(started);
    Ok(cert)
}

/// Outcome of the `a_{α,β}` check, alongside its certificate.
#[derive(Clone, Debug, Serialize)]
pub struct AbSummary {
    pub valid_pairs: usize,
    pub excluded_pairs: usize,
    pub kernel_classes: usize,
    pub projection_kernel: usize,
}

/// For `(α : β) ∈ P¹(F_f)` with `f ∤ N(α + βσ)`: `a_{α,β} = (f², f(α + βσ))` in `O'`
/// satisfies `[a] ⋆ E/C = E/(α + βσ̄)(C)`, and these classes fill `ker(Cl_{O'} → Cl_O)`.
pub fn ab_ideal_check(vi: &VolcanoInstance, seed: u64) -> Result<(Certificate, AbSummary)> {
    let started = Instant::now();
    let f = vi.f;
    let o = &vi.surface_order;
    let sub = &vi.floor_order;
    let mut cert = Certificate::new(vi.scenario("ab_ideal", (f * f, 0, f)), seed);
    let e = vi.surface.first().ok_or_else(|| Error::Precondition("empty surface".into()))?;
    let kernels = descending_kernels(e, f as u64)?;
    let pairs: Vec<(i64, i64)> = (0..f).map(|a| (a, 1)).chain(std::iter::once((1, 0))).collect();
    // f·ω = ω' + shift in terms of the suborder generator
    let shift = (f * o.omega_trace - sub.omega_trace) / 2;
    let reps = suborder_reps(vi)?;
    let mut classes = BTreeSet::new();
    let (mut valid, mut excluded) = (0, 0);
    let mut formula: std::result::Result<(), String> = Ok(());
    for (al, be) in pairs {
        if o.norm(Elem::new(al, be)) % f as i128 == 0 {
            excluded += 1;
            continue;
        }
        valid += 1;
        let a = QuadIdeal::from_generators(sub, &[Elem::int(f * f), Elem::new(f * al + be * shift, be)])?;
        if !a.is_proper(sub) || a.norm() != f * f {
            formula = Err(format!("a_({al}:{be}) = {a:?} is not a proper ideal of norm f²"));
            continue;
        }
        let form = class_of(sub, &a)?;
        classes.insert(form);
        let rep = &reps.iter().find(|r| r.0 == form).expect("every class has a representative").1;
        for k in &kernels {
            let lhs = act_on_curve(&vi.quotient(e, k)?, rep)?;
            // (α + βσ̄)(K) with σ̄ = t − σ
            let s = e.sigma(k)?;
            let moved = e.curve.add(&e.curve.mul((al + be * o.omega_trace) as i128, k), &e.curve.mul(-be as i128, &s));
            if subgroup(&e.curve, &[moved])?.len() as i64 != f {
                formula = Err(format!("(α + βσ̄)(C) is not of order f for ({al}:{be})"));
                continue;
            }
            if lhs.curve != vi.quotient(e, &moved)?.curve {
                formula = Err(format!("[a_({al}:{be})] ⋆ π(E, C) ≠ π(E, (α + βσ̄)(C))"));
            }
        }
    }
    cert.record("action_formula", formula);
    let tr = suborder_transport(o, f)?;
    let ker = kernel_of_projection(&tr.group);
    let ker_forms: BTreeSet<BQForm> =
        tr.sub_classes.iter().zip(&tr.image).filter(|(_, i)| ker.contains(i)).map(|(c, _)| c.form).collect();
    cert.record(
        "kernel_exhausted",
        if ker_forms == classes {
            Ok(())
        } else {
            Err(format!("{} classes of a_(α,β), kernel has {}", classes.len(), ker_forms.len()))
        },
    );
    let eig = if kernels.len() as i64 == f + 1 { 0 } else { (f + 1) as usize - kernels.len() };
    cert.record(
        "exclusions",
        if excluded == eig { Ok(()) } else { Err(format!("{excluded} excluded pairs, {eig} eigenspaces")) },
    );
    cert.group_order = ker_forms.len();
    cert.set_size = classes.len();
    cert.finish(started);
    Ok((
        cert,
        AbSummary {
            valid_pairs: valid,
            excluded_pairs: excluded,
            kernel_classes: classes.len(),
            projection_kernel: ker.len(),
        },
    ))
}
