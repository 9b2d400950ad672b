//! Supersingular curves over `F_p` on the floor of the 2-volcano.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curve::Curve;
use super::field::Tower;
use crate::error::{domain, Result};

/// Curves with `j(E) = j` up to `F_p`-isomorphism (quadratic twists, and the extra
/// twists at `j = 0, 1728`).
fn curves_with_j(t: &Arc<Tower>, j: u64) -> Vec<Curve> {
    let p = t.p;
    let mut out = Vec::new();
    if j == 0 || j == 1728 % p {
        for c in 1..p as i64 {
            let (a, b) = if j == 0 { (0, c) } else { (c, 0) };
            if let Ok(e) = Curve::new(t, a, b) {
                out.push(e);
            }
        }
        return out;
    }
    // y^2 = x^3 + 3k x + 2k with k = j/(1728 − j), and its quadratic twist
    let f = t.level(1);
    let k = f.div(f.from_int(j as i64), f.from_int(1728 - j as i64)).expect("j ≠ 1728").0[0] as i64;
    let nonsq = (2..p).find(|c| t.legendre(*c) == -1).expect("p odd") as i64;
    for c in [1, nonsq] {
        let (a, b) = (3 * k * c * c, 2 * k * c * c * c);
        if let Ok(e) = Curve::new(t, a % p as i64, b % p as i64) {
            out.push(e);
        }
    }
    out
}

/// All `F_p`-isomorphism classes of curves with `#E(F_p) = p + 1` and a single rational
/// 2-torsion point (endomorphism ring `Z[√−p]`), as canonical representatives.
pub fn supersingular_floor_set(p: u64) -> Result<Vec<Curve>> {
    if p % 4 != 3 || p < 7 {
        return domain(format!("p = {p} must be a prime ≡ 3 (mod 4), at least 7"));
    }
    let t = Tower::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut out = Vec::new();
    for j in 0..p {
        for e in curves_with_j(&t, j) {
            // cheap filter: random points killed by p + 1
            let quick = (0..2).all(|_| e.mul(p as i128 + 1, &e.random_point(1, &mut rng)).inf);
            if !quick || e.order(1) != p as u128 + 1 || e.rational_two_torsion().len() != 1 {
                continue;
            }
            let (c, _) = e.canonical();
            if seen.insert((c.a, c.b)) {
                out.push(c);
            }
        }
    }
    out.sort_by_key(|e| (e.a, e.b));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::{class_number, order_from_disc};

    /// Oracle: enumerate every (A, B), keep supersingular floor curves, bucket by canonical form.
    fn brute(p: u64) -> usize {
        let t = Tower::new(p).unwrap();
        let mut set = BTreeSet::new();
        for a in 0..p as i64 {
            for b in 0..p as i64 {
                let Ok(e) = Curve::new(&t, a, b) else { continue };
                if e.order(1) == p as u128 + 1 && e.rational_two_torsion().len() == 1 {
                    let (c, _) = e.canonical();
                    set.insert((c.a, c.b));
                }
            }
        }
        set.len()
    }

    #[test]
    fn small_primes() {
        assert_eq!(supersingular_floor_set(11).unwrap().len(), 3);
        assert_eq!(supersingular_floor_set(7).unwrap().len(), 1);
        for p in [19u64, 23, 31, 43] {
            let n = supersingular_floor_set(p).unwrap().len();
            assert_eq!(n, brute(p), "p = {p}");
            assert_eq!(n, class_number(&order_from_disc(-4 * p as i64).unwrap()), "p = {p}");
        }
        assert!(supersingular_floor_set(13).is_err());
    }

    #[test]
    fn p419() {
        let n = supersingular_floor_set(419).unwrap().len();
        assert_eq!(n, class_number(&order_from_disc(-1676).unwrap()));
        assert_eq!(n, 27);
    }
}
