use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use gencl::congruence::{exact_sequence_audit, gen_class_group, suborder_transport, LambdaSet, Modulus, UnitGroup};
use gencl::curvefield::{subgroup, torsion_basis, torsion_level, velu, weil_pairing, Curve, Point, Tower};
use gencl::lab::{
    ab_ideal_check, build_volcano, eigenvector, fullgroup, gpv, integers, nthpower, suborder_equivalence, vectorize,
    ActionEngine, Certificate,
};
use gencl::oriented::LevelSpace;
use gencl::quadforms::{class_number, order_from_disc, splitting_type, Elem, SplitType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn certified(c: &Certificate, size: usize) -> Result<(), String> {
    let failed: Vec<&str> = c.failures().iter().map(|f| f.name.as_str()).collect();
    ensure(c.pass, || format!("{}: failed checks {failed:?}", c.scenario.label))?;
    ensure(c.set_size == size && c.group_order == size, || {
        format!("{}: |Cl_H| = {}, |set| = {}, expected {size}", c.scenario.label, c.group_order, c.set_size)
    })
}

const LAMBDAS: [LambdaSet; 4] =
    [LambdaSet::UnitOnly, LambdaSet::Integers, LambdaSet::IntegerPowers(2), LambdaSet::FullOrder];

fn exact_sequence() -> Outcome {
    let o = order_from_disc(-4).map_err(|e| e.to_string())?;
    let m = Modulus::scalar(&o, 3).map_err(|e| e.to_string())?;
    let worked = exact_sequence_audit(&o, &m, LambdaSet::UnitOnly).map_err(|e| e.to_string())?;
    ensure(worked.pass && worked.sizes.2 == 2, || format!("Z[i], 3O, one: {:?}", worked.sizes))?;

    let mut triples = 0;
    let mut kinds = [0usize; 3];
    let mut tags = [0usize; 4];
    for d in [-3i64, -4, -7, -8, -11, -15, -20, -23, -36, -44, -84, -104, -152, -199] {
        let o = order_from_disc(d).map_err(|e| e.to_string())?;
        for l in [2i64, 3, 5, 7] {
            if !o.coprime_to_cond(l) {
                continue;
            }
            let (p, kind) = match splitting_type(&o, l).map_err(|e| e.to_string())? {
                SplitType::Split(p, _) => (p, 0),
                SplitType::Inert(p) => (p, 1),
                SplitType::Ramified(p) => (p, 2),
            };
            let m = Modulus::new(&o, p).map_err(|e| e.to_string())?;
            let tag = (d.unsigned_abs() as usize + l as usize) % 4;
            let a = exact_sequence_audit(&o, &m, LAMBDAS[tag]).map_err(|e| e.to_string())?;
            let g = gen_class_group(&o, &m, LAMBDAS[tag]).map_err(|e| e.to_string())?;
            ensure(a.pass && a.sizes.2 == a.predicted && g.len() == a.predicted, || {
                format!(
                    "D = {d}, l = {l}, {}: {:?} predicted {}, keyed {}",
                    LAMBDAS[tag],
                    a.sizes,
                    a.predicted,
                    g.len()
                )
            })?;
            triples += 1;
            kinds[kind] += 1;
            tags[tag] += 1;
        }
    }
    ensure(triples >= 25 && kinds.iter().all(|&k| k > 0) && tags.iter().all(|&t| t > 0), || {
        format!("coverage: {triples} triples, split/inert/ramified {kinds:?}, tags {tags:?}")
    })?;
    Ok(format!("{triples} triples, split/inert/ramified {kinds:?}, per tag {tags:?}, Z[i] 3O one -> 2"))
}

fn suborder_isomorphism() -> Outcome {
    let pairs = [
        (-4i64, 3i64),
        (-4, 5),
        (-4, 7),
        (-3, 2),
        (-3, 5),
        (-7, 2),
        (-7, 3),
        (-8, 3),
        (-11, 2),
        (-15, 2),
        (-23, 3),
        (-20, 3),
    ];
    for (d, f) in pairs {
        let o = order_from_disc(d).map_err(|e| e.to_string())?;
        let t = suborder_transport(&o, f).map_err(|e| format!("D = {d}, f = {f}: {e}"))?;
        let h = class_number(&order_from_disc(d * f * f).map_err(|e| e.to_string())?);
        ensure(t.image.len() == h && t.group.len() == h, || {
            format!("D = {d}, f = {f}: h(Z+fO) = {h}, image {}", t.image.len())
        })?;
    }
    Ok(format!("{} pairs, bijective and multiplicative", pairs.len()))
}

fn gpv_419() -> Result<&'static (Certificate, ActionEngine), String> {
    static RUN: OnceLock<Result<(Certificate, ActionEngine), String>> = OnceLock::new();
    RUN.get_or_init(|| gpv(419, 3, 1).map_err(|e| e.to_string())).as_ref().map_err(Clone::clone)
}

fn ray_class_action() -> Outcome {
    let mut sizes = Vec::new();
    for (p, size) in [(11u64, 6usize), (23, 6)] {
        let (c, _) = gpv(p, 3, 1).map_err(|e| e.to_string())?;
        certified(&c, size)?;
        sizes.push(format!("p = {p}: {}", c.set_size));
    }
    let (c, _) = gpv_419()?;
    certified(c, 54)?;
    sizes.push(format!("p = 419: {}", c.set_size));
    Ok(sizes.join(", "))
}

fn lambda_tags() -> Outcome {
    let runs = [
        ("one", gpv(11, 3, 2), 6usize),
        ("int", integers(11, 5, 2), 12),
        ("pow:2", nthpower(11, 5, 2, 2), 24),
        ("full", fullgroup(11, 3, 2), 3),
    ];
    let mut out = Vec::new();
    for (tag, run, size) in runs {
        let (c, _) = run.map_err(|e| format!("{tag}: {e}"))?;
        certified(&c, size)?;
        out.push(format!("{tag} {size}"));
    }
    for (d, f) in [(-7i64, 5i64), (-23, 5), (-20, 13)] {
        let o = order_from_disc(d).map_err(|e| e.to_string())?;
        ensure(matches!(splitting_type(&o, f), Ok(SplitType::Inert(_))), || format!("{f} not inert in D = {d}"))?;
        let g = gen_class_group(&o, &Modulus::scalar(&o, f).map_err(|e| e.to_string())?, LambdaSet::IntegerPowers(2))
            .map_err(|e| e.to_string())?;
        let expect = 2 * (f as usize + 1) * class_number(&o);
        ensure(g.len() == expect, || format!("D = {d}, f = {f}: {} != 2(f+1)h = {expect}", g.len()))?;
        out.push(format!("D={d} f={f} {expect}"));
    }
    Ok(out.join(", "))
}

fn certified_scenarios() -> Result<Vec<&'static (Certificate, ActionEngine)>, String> {
    static RUNS: OnceLock<Result<Vec<(Certificate, ActionEngine)>, String>> = OnceLock::new();
    let small = RUNS
        .get_or_init(|| {
            [
                gpv(11, 3, 5),
                gpv(23, 3, 5),
                integers(11, 5, 5),
                nthpower(11, 5, 2, 5),
                fullgroup(11, 3, 5),
                eigenvector(11, 3, 5),
            ]
            .into_iter()
            .map(|r| r.map_err(|e| e.to_string()))
            .collect()
        })
        .as_ref()
        .map_err(Clone::clone)?;
    Ok(small.iter().chain([gpv_419()?]).collect())
}

/// Scans `E[m]` inside `E[N]` and counts the points generating it as an `O`-module.
fn generator_oracle(space: &LevelSpace, oc: &gencl::oriented::OrientedCurve) -> Result<(Vec<Point>, usize), String> {
    let m = &space.modulus;
    let n = m.int_gen() as u64;
    let e = &oc.curve;
    let lvl = torsion_level(e, n).ok_or("E[N] not reachable")?;
    let (p, q) = torsion_basis(e, n, lvl).map_err(|e| e.to_string())?;
    let gens = [Elem::new(m.ideal.a, 0), Elem::new(m.ideal.b, m.ideal.c)];
    let mut torsion = Vec::new();
    for a in 0..n as i128 {
        for b in 0..n as i128 {
            let pt = e.lin(a, &p, b, &q);
            let mut killed = true;
            for g in gens {
                killed &= oc.apply(g, &pt).map_err(|e| e.to_string())? == e.mul(0, &pt);
            }
            if killed {
                torsion.push(pt);
            }
        }
    }
    let mut count = 0;
    for pt in &torsion {
        let s = oc.sigma(pt).map_err(|e| e.to_string())?;
        if subgroup(e, &[*pt, s]).map_err(|e| e.to_string())?.len() as i64 == m.norm {
            count += 1;
        }
    }
    Ok((torsion, count))
}

fn module_generators() -> Outcome {
    let mut curves = 0;
    let scenarios = certified_scenarios()?;
    for (c, engine) in &scenarios {
        let label = &c.scenario.label;
        let check = c.check("module_generators").ok_or(format!("{label}: no module_generators check"))?;
        ensure(check.ok, || format!("{label}: {:?}", check.counterexample))?;
        let space = &engine.space;
        let units = UnitGroup::new(&space.order, &space.modulus).len();
        let mut seen = Vec::new();
        for lc in &engine.set {
            let j = lc.oc.curve.j_invariant();
            if seen.contains(&j) {
                continue;
            }
            seen.push(j);
            let (torsion, count) = generator_oracle(space, &lc.oc)?;
            ensure(torsion.len() as i64 == space.modulus.norm && count == units, || {
                format!("{label}, j = {j}: |E[m]| = {}, {count} generators, |(O/m)^x| = {units}", torsion.len())
            })?;
            let r = space.module_generator(&lc.oc).map_err(|e| e.to_string())?;
            let span =
                subgroup(&lc.oc.curve, &[r, lc.oc.sigma(&r).map_err(|e| e.to_string())?]).map_err(|e| e.to_string())?;
            ensure(torsion.contains(&r) && span.len() as i64 == space.modulus.norm, || {
                format!("{label}, j = {j}: returned point does not generate E[m]")
            })?;
            curves += 1;
        }
    }
    Ok(format!("{curves} curves across {} scenarios", scenarios.len()))
}

fn volcano() -> Outcome {
    let vi = build_volcano(13, 4, 3).map_err(|e| e.to_string())?;
    let c = suborder_equivalence(&vi, 1, false).map_err(|e| e.to_string())?;
    let h = class_number(&order_from_disc(-36).map_err(|e| e.to_string())?);
    certified(&c, h)?;
    ensure(h == 2, || format!("h(-36) = {h}"))?;
    let (ab, summary) = ab_ideal_check(&vi, 1).map_err(|e| e.to_string())?;
    ensure(ab.pass, || format!("a_(alpha,beta): {:?}", ab.failures()))?;
    ensure(summary.kernel_classes == 2, || format!("projection kernel of order {}", summary.kernel_classes))?;
    Ok(format!("|Z| = {h}, kernel of order {}, {} valid pairs", summary.kernel_classes, summary.valid_pairs))
}

fn vectorization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = 0;
    for (_, engine) in certified_scenarios()? {
        for _ in 0..100 {
            let cls = rng.gen_range(0..engine.group.len());
            let x1 = &engine.set[rng.gen_range(0..engine.set.len())];
            let x2 = engine.act(cls, x1).map_err(|e| e.to_string())?;
            let got = vectorize(&engine, x1, &x2).map_err(|e| e.to_string())?;
            ensure(got == cls, || format!("recovered class {got}, acted with {cls}"))?;
            total += 1;
        }
    }
    Ok(format!("{total}/{total} recovered"))
}

fn rational_point_of_order(e: &Curve, n: u128, rng: &mut ChaCha8Rng) -> Option<Point> {
    let total = e.order(1);
    if total % n != 0 {
        return None;
    }
    (0..100).map(|_| e.mul((total / n) as i128, &e.random_point(1, rng))).find(|p| e.point_order(p) == n)
}

fn kernel_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let primes = [7u64, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43];

    let mut bilinear = 0;
    while bilinear < 1000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let t = Tower::new(p).map_err(|e| e.to_string())?;
        let Ok(e) = Curve::new(&t, rng.gen_range(0..p as i64), rng.gen_range(0..p as i64)) else { continue };
        let n = rng.gen_range(2..6u64);
        let Some(lvl) = torsion_level(&e, n).filter(|_| n % p != 0) else { continue };
        let (bp, bq) = torsion_basis(&e, n, lvl).map_err(|e| e.to_string())?;
        let f = e.field(lvl);
        let base = weil_pairing(&e, &bp, &bq, n).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let (a, b) = (rng.gen_range(0..n as i128), rng.gen_range(0..n as i128));
            let lhs = weil_pairing(&e, &e.mul(a, &bp), &e.mul(b, &bq), n).map_err(|e| e.to_string())?;
            ensure(lhs == f.pow(base, (a * b) as u128), || format!("p = {p}, n = {n}: e(aP, bQ) != e(P, Q)^ab"))?;
            bilinear += 1;
        }
    }

    let mut dual = 0;
    while dual < 1000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let t = Tower::new(p).map_err(|e| e.to_string())?;
        let Ok(e) = Curve::new(&t, rng.gen_range(0..p as i64), rng.gen_range(0..p as i64)) else { continue };
        let n = [2u128, 3, 5][rng.gen_range(0..3)];
        let Some(g) = rational_point_of_order(&e, n, &mut rng) else { continue };
        let phi = velu(&e, &[g]).map_err(|e| e.to_string())?;
        let back = phi.dual().map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let pt = e.random_point(2, &mut rng);
            ensure(back.eval(&phi.eval(&pt)) == e.mul(n as i128, &pt), || format!("p = {p}, deg {n}: dual∘φ != [n]"))?;
            dual += 1;
        }
    }

    let mut hasse = 0;
    while hasse < 1000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let t = Tower::new(p).map_err(|e| e.to_string())?;
        let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
        let Ok(e) = Curve::new(&t, a as i64, b as i64) else { continue };
        let count = 1
            + (0..p)
                .map(|x| match t.legendre((x * x % p * x + a * x + b) % p) {
                    1 => 2,
                    0 => 1,
                    _ => 0,
                })
                .sum::<u128>();
        let tr = p as i128 + 1 - count as i128;
        ensure(e.order(1) == count && tr * tr <= 4 * p as i128, || format!("p = {p}, a = {a}, b = {b}: #E = {count}"))?;
        hasse += 1;
    }
    Ok(format!("{bilinear} pairing, {dual} dual, {hasse} Hasse checks"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("exact sequence audit", exact_sequence),
        ("suborder isomorphism", suborder_isomorphism),
        ("ray class action", ray_class_action),
        ("lambda tags", lambda_tags),
        ("module generators", module_generators),
        ("volcano suborder equivalence", volcano),
        ("vectorization round trip", vectorization),
        ("numerical kernel", kernel_sanity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({why}; {secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
