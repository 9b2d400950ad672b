//! Weil pairing, discrete logarithms and torsion bases.

use std::collections::HashMap;
use std::hash::Hash;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curve::{join_level, Curve, Point};
use super::field::{Fe, Field, MAX_LEVEL};
use crate::arith::{factor128, gcd_u};
use crate::error::{Error, Result};

/// Value at `r` of the Miller function with divisor `n(P) − n(∞)`;
/// `None` when `r` hits a zero or pole of an intermediate line.
fn miller(e: &Curve, f: &Field, n: u128, p: &Point, r: &Point) -> Option<Fe> {
    let (mut num, mut den) = (f.one(), f.one());
    let mut t = *p;
    let bits = 128 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        let (l, v) = line(e, f, &t, &t, r)?;
        num = f.mul(f.sqr(num), l);
        den = f.mul(f.sqr(den), v);
        t = e.double(&t);
        if (n >> i) & 1 == 1 {
            let (l, v) = line(e, f, &t, p, r)?;
            num = f.mul(num, l);
            den = f.mul(den, v);
            t = e.add(&t, p);
        }
    }
    if num.is_zero() || den.is_zero() {
        return None;
    }
    f.div(num, den)
}

/// The line through `t1, t2` and the vertical through `t1 + t2`, both evaluated at `r`.
fn line(e: &Curve, f: &Field, t1: &Point, t2: &Point, r: &Point) -> Option<(Fe, Fe)> {
    if t1.inf || t2.inf {
        return Some((f.one(), f.one()));
    }
    let vert = |x: Fe| f.sub(r.x, x);
    if t1.x == t2.x && f.add(t1.y, t2.y).is_zero() {
        let l = vert(t1.x);
        return (!l.is_zero()).then_some((l, f.one()));
    }
    let lambda = if t1 == t2 {
        f.div(f.add(f.scale(3, f.sqr(t1.x)), Fe::constant(e.a)), f.scale(2, t1.y))?
    } else {
        f.div(f.sub(t2.y, t1.y), f.sub(t2.x, t1.x))?
    };
    let l = f.sub(f.sub(r.y, t1.y), f.mul(lambda, f.sub(r.x, t1.x)));
    let s = e.add(t1, t2);
    let v = vert(s.x);
    (!l.is_zero() && !v.is_zero()).then_some((l, v))
}

/// The Weil pairing `e_n(P, Q)`, valued in the `n`-th roots of unity at the common level.
pub fn weil_pairing(e: &Curve, p: &Point, q: &Point, n: u64) -> Result<Fe> {
    let n128 = n as u128;
    for pt in [p, q] {
        if !e.contains(pt) || !e.mul(n as i128, pt).inf {
            return Err(Error::NotTorsion(n));
        }
    }
    let level = join_level(p.level, q.level);
    let f = e.field(level);
    if p.inf || q.inf || n == 1 || p == q {
        return Ok(f.one());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ n);
    for _ in 0..64 {
        let s = e.random_point(level, &mut rng);
        let qs = e.add(q, &s);
        let ps = e.sub(p, &s);
        let ms = e.neg(&s);
        if [qs, ps, ms, s].iter().any(|x| x.inf) {
            continue;
        }
        let vals = (
            miller(e, f, n128, p, &qs),
            miller(e, f, n128, p, &s),
            miller(e, f, n128, q, &ps),
            miller(e, f, n128, q, &ms),
        );
        if let (Some(a), Some(b), Some(c), Some(d)) = vals {
            let num = f.mul(a, d);
            let den = f.mul(b, c);
            if let Some(z) = f.div(num, den) {
                return Ok(z);
            }
        }
    }
    Err(Error::Consistency("no admissible auxiliary point for the Miller loop".into()))
}

/// Pohlig–Hellman with baby-step giant-step in a cyclic group of order `n` generated by `g`.
/// Returns `x ∈ [0, n)` with `g^x = h`.
pub fn dlog_cyclic<T, Op, Pow>(g: &T, h: &T, n: u128, op: Op, pow: Pow) -> Option<u128>
where
    T: Clone + Eq + Hash,
    Op: Fn(&T, &T) -> T,
    Pow: Fn(&T, u128) -> T,
{
    if n == 1 {
        return (pow(h, 1) == pow(g, 0)).then_some(0);
    }
    let mut residues: Vec<(u128, u128)> = Vec::new();
    for (l, e) in factor128(n) {
        let le = l.pow(e);
        let gl = pow(g, n / le);
        let hl = pow(h, n / le);
        let gamma = pow(&gl, le / l);
        let mut x = 0u128;
        let mut lk = 1u128;
        for _ in 0..e {
            // (g_l^{-x} h_l)^{l^{e-1-k}}
            let inv = pow(&gl, le - x % le);
            let hk = pow(&op(&inv, &hl), le / lk / l);
            let d = bsgs(&gamma, &hk, l, &op, &pow)?;
            x += d * lk;
            lk *= l;
        }
        residues.push((x % le, le));
    }
    let mut acc = (0u128, 1u128);
    for (r, m) in residues {
        // combine x ≡ acc.0 (mod acc.1), x ≡ r (mod m), coprime moduli
        let inv = crate::arith::inv_mod((acc.1 % m) as i128, m as i128)? as u128;
        let t = ((r + m - acc.0 % m) % m) * inv % m;
        acc = (acc.0 + acc.1 * t, acc.1 * m);
    }
    Some(acc.0 % n)
}

fn bsgs<T, Op, Pow>(g: &T, h: &T, l: u128, op: &Op, pow: &Pow) -> Option<u128>
where
    T: Clone + Eq + Hash,
    Op: Fn(&T, &T) -> T,
    Pow: Fn(&T, u128) -> T,
{
    let m = (crate::arith::isqrt(l) + 1).max(1);
    let mut table = HashMap::new();
    let mut cur = pow(g, 0);
    for j in 0..m {
        table.entry(cur.clone()).or_insert(j);
        cur = op(&cur, g);
    }
    let step = pow(g, l - m % l);
    let mut gamma = h.clone();
    for i in 0..=m {
        if let Some(j) = table.get(&gamma) {
            return Some((i * m + j) % l);
        }
        gamma = op(&gamma, &step);
    }
    None
}

/// `x` with `x·base = target` in the cyclic group generated by `base` of order `n`.
pub fn dlog_points(e: &Curve, base: &Point, target: &Point, n: u128) -> Option<u128> {
    dlog_cyclic(base, target, n, |a, b| e.add(a, b), |a, k| e.mul(k as i128, a))
}

/// `x` with `g^x = h` in the multiplicative group of a field, `g` of order `n`.
pub fn dlog_field(f: &Field, g: Fe, h: Fe, n: u128) -> Option<u128> {
    dlog_cyclic(&g, &h, n, |a, b| f.mul(*a, *b), |a, k| f.pow(*a, k))
}

/// Coordinates `(x, y)` of `R = xP + yQ` in a pairing-verified basis of `E[N]`.
pub fn dlog_2d(e: &Curve, r: &Point, p: &Point, q: &Point, n: u64) -> Result<(u64, u64)> {
    if !e.mul(n as i128, r).inf {
        return Err(Error::NotTorsion(n));
    }
    if n == 1 {
        return Ok((0, 0));
    }
    let z = weil_pairing(e, p, q, n)?;
    let level = join_level(join_level(p.level, q.level), r.level);
    let f = e.field(level);
    if f.order_dividing(z, n as u128) != n as u128 {
        return Err(Error::Precondition(format!("({p:?}, {q:?}) is not a basis of E[{n}]")));
    }
    let a = weil_pairing(e, r, q, n)?;
    let b = weil_pairing(e, p, r, n)?;
    let x = dlog_field(f, z, a, n as u128).ok_or_else(|| Error::Consistency("pairing dlog failed".into()))?;
    let y = dlog_field(f, z, b, n as u128).ok_or_else(|| Error::Consistency("pairing dlog failed".into()))?;
    if e.lin(x as i128, p, y as i128, q) != *r {
        return Err(Error::Consistency("2-d discrete logarithm does not reproduce the point".into()));
    }
    Ok((x as u64, y as u64))
}

fn v_l(mut n: u128, l: u128) -> u32 {
    let mut v = 0;
    while n % l == 0 {
        n /= l;
        v += 1;
    }
    v
}

/// Basis of `E[l^e]` over the given level, if the full group is rational there.
fn prime_power_basis(e: &Curve, l: u128, ex: u32, level: u8, rng: &mut ChaCha8Rng) -> Result<Option<(Point, Point)>> {
    let total = e.order(level);
    let v = v_l(total, l);
    if v < 2 * ex {
        return Ok(None);
    }
    let cof = (total / l.pow(v)) as i128;
    let sample = |rng: &mut ChaCha8Rng| {
        let x = e.mul(cof, &e.random_point(level, rng));
        let o = v_l(e.order_dividing(&x, l.pow(v)), l);
        (x, o)
    };
    for _attempt in 0..8 {
        let mut best = sample(rng);
        for _ in 0..24 {
            let c = sample(rng);
            if c.1 > best.1 {
                best = c;
            }
        }
        let (x, a) = best;
        let b = v - a;
        if b < ex {
            return Ok(None);
        }
        let base = e.mul(l.pow(b) as i128, &x);
        for _ in 0..32 {
            let y = e.mul(cof, &e.random_point(level, rng));
            let target = e.mul(l.pow(b) as i128, &y);
            let Some(c) = dlog_points(e, &base, &target, l.pow(a - b)) else { break };
            let y2 = e.sub(&y, &e.mul(c as i128, &x));
            let p = e.mul(l.pow(a - ex) as i128, &x);
            let q = e.mul(l.pow(b - ex) as i128, &y2);
            let n = l.pow(ex) as u64;
            let z = weil_pairing(e, &p, &q, n)?;
            if e.field(level).order_dividing(z, n as u128) == n as u128 {
                return Ok(Some((p, q)));
            }
        }
    }
    Err(Error::Consistency(format!("could not assemble a basis of E[{l}^{ex}]")))
}

fn basis_at(e: &Curve, n: u64, level: u8) -> Result<Option<(Point, Point)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(e.p() ^ (e.a << 20) ^ (e.b << 40) ^ (n << 8) ^ level as u64);
    let (mut p, mut q) = (Point::INFINITY, Point::INFINITY);
    for (l, ex) in factor128(n as u128) {
        match prime_power_basis(e, l, ex, level, &mut rng)? {
            Some((a, b)) => {
                p = e.add(&p, &a);
                q = e.add(&q, &b);
            }
            None => return Ok(None),
        }
    }
    Ok(Some((p, q)))
}

/// Smallest level `≤ 6` over which all of `E[n]` is rational.
pub fn torsion_level(e: &Curve, n: u64) -> Option<u8> {
    if n == 1 {
        return Some(1);
    }
    (1..=MAX_LEVEL as u8).find(|k| matches!(basis_at(e, n, *k), Ok(Some(_))))
}

/// A basis `(P, Q)` of `E[n]` over `F_{q^k}` with `e_n(P, Q)` of exact order `n`.
pub fn torsion_basis(e: &Curve, n: u64, level: u8) -> Result<(Point, Point)> {
    if n == 1 {
        return Ok((Point::INFINITY, Point::INFINITY));
    }
    if gcd_u(n, e.p()) != 1 {
        return Err(Error::Precondition(format!("{n} is divisible by the characteristic {}", e.p())));
    }
    match basis_at(e, n, level)? {
        Some((p, q)) => {
            let z = weil_pairing(e, &p, &q, n)?;
            if e.field(level).order_dividing(z, n as u128) != n as u128 {
                return Err(Error::Consistency(format!("E[{n}] basis fails the pairing test")));
            }
            Ok((p, q))
        }
        None => Err(Error::TorsionUnavailable {
            n,
            level,
            minimal: torsion_level(e, n).map_or_else(|| "none up to 6".to_string(), |k| k.to_string()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvefield::Tower;
    use rand::Rng;

    fn floor11() -> Curve {
        let t = Tower::new(11).unwrap();
        // x^3 + x = x(x^2 + 1) has a single root mod 11
        Curve::new(&t, 1, 0).unwrap()
    }

    #[test]
    fn basis_and_errors() {
        let e = floor11();
        let (p, q) = torsion_basis(&e, 3, 2).unwrap();
        let z = weil_pairing(&e, &p, &q, 3).unwrap();
        let f = e.field(2);
        assert_ne!(z, f.one());
        assert_eq!(f.pow(z, 3), f.one());
        match torsion_basis(&e, 3, 1) {
            Err(Error::TorsionUnavailable { n: 3, level: 1, minimal }) => assert_eq!(minimal, "2"),
            other => panic!("{other:?}"),
        }
        assert_eq!(torsion_basis(&e, 1, 1).unwrap(), (Point::INFINITY, Point::INFINITY));
        assert!(matches!(torsion_basis(&e, 11, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn pairing_properties() {
        let t = Tower::new(419).unwrap();
        let e = Curve::new(&t, 1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3u64, 4, 5, 7, 12, 20] {
            let lvl = torsion_level(&e, n).unwrap();
            let f = e.field(lvl);
            let (p, q) = torsion_basis(&e, n, lvl).unwrap();
            assert_eq!(weil_pairing(&e, &p, &p, n).unwrap(), f.one());
            let z = weil_pairing(&e, &p, &q, n).unwrap();
            let zi = weil_pairing(&e, &q, &p, n).unwrap();
            assert_eq!(f.mul(z, zi), f.one());
            for _ in 0..5 {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let lhs = weil_pairing(&e, &e.mul(a as i128, &p), &e.mul(b as i128, &q), n).unwrap();
                assert_eq!(lhs, f.pow(z, (a * b) as u128));
                // bilinearity in the first argument with a mixed point
                let r = e.lin(a as i128, &p, b as i128, &q);
                let lhs = weil_pairing(&e, &e.add(&r, &p), &q, n).unwrap();
                let rhs = f.mul(weil_pairing(&e, &r, &q, n).unwrap(), z);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn dlog_roundtrip() {
        let t = Tower::new(23).unwrap();
        let e = Curve::new(&t, 1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [2u64, 3, 4, 6, 8, 12] {
            let lvl = torsion_level(&e, n).unwrap();
            let (p, q) = torsion_basis(&e, n, lvl).unwrap();
            assert_eq!(dlog_2d(&e, &Point::INFINITY, &p, &q, n).unwrap(), (0, 0));
            assert_eq!(dlog_2d(&e, &e.add(&p, &q), &p, &q, n).unwrap(), (1 % n, 1 % n));
            for _ in 0..10 {
                let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let r = e.lin(x as i128, &p, y as i128, &q);
                assert_eq!(dlog_2d(&e, &r, &p, &q, n).unwrap(), (x, y));
            }
            let lvl_pt = e.random_point(lvl, &mut rng);
            if !e.mul(n as i128, &lvl_pt).inf {
                assert!(matches!(dlog_2d(&e, &lvl_pt, &p, &q, n), Err(Error::NotTorsion(_))));
            }
        }
    }

    #[test]
    fn cyclic_dlog() {
        let t = Tower::new(101).unwrap();
        let f = t.level(1);
        let g = f.from_int(2); // primitive root mod 101
        for x in [0u128, 1, 17, 63, 99] {
            assert_eq!(dlog_field(f, g, f.pow(g, x), 100), Some(x));
        }
    }
}
