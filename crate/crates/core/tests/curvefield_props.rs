use gencl::curvefield::{
    supersingular_floor_set, torsion_basis, torsion_level, velu, weil_pairing, Curve, Point, Tower,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational_point_of_order(e: &Curve, n: u128) -> Option<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let total = e.order(1);
    if total % n != 0 {
        return None;
    }
    for _ in 0..200 {
        let p = e.mul((total / n) as i128, &e.random_point(1, &mut rng));
        if e.point_order(&p) == n {
            return Some(p);
        }
    }
    None
}

#[test]
fn pairing_compatible_with_isogenies() {
    // horizontal 3-isogeny between floor curves over F_23, pairings on E[4]
    let curves = supersingular_floor_set(23).unwrap();
    let e = &curves[0];
    let g = rational_point_of_order(e, 3).unwrap();
    let phi = velu(e, &[g]).unwrap();
    let lvl = torsion_level(e, 4).unwrap();
    let (p, q) = torsion_basis(e, 4, lvl).unwrap();
    let f = e.field(lvl);
    let lhs = weil_pairing(&phi.codomain, &phi.eval(&p), &phi.eval(&q), 4).unwrap();
    let rhs = f.pow(weil_pairing(e, &p, &q, 4).unwrap(), 3);
    assert_eq!(lhs, rhs);
}

#[test]
fn dual_composition_is_multiplication() {
    let t = Tower::new(31).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    for (a, b) in [(1i64, 3i64), (2, 5), (4, 1), (7, 7)] {
        let e = Curve::new(&t, a, b).unwrap();
        for n in [2u128, 3, 5] {
            let Some(g) = rational_point_of_order(&e, n) else { continue };
            let phi = velu(&e, &[g]).unwrap();
            let dual = phi.dual().unwrap();
            for _ in 0..100 {
                let pt = e.random_point(2, &mut rng);
                assert_eq!(dual.eval(&phi.eval(&pt)), e.mul(n as i128, &pt));
            }
            checked += 1;
        }
    }
    assert!(checked >= 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn hasse_and_bases(p in prop::sample::select(vec![7u64, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43]),
                       a in 0i64..50, b in 0i64..50, n in 2u64..7) {
        let t = Tower::new(p).unwrap();
        let Ok(e) = Curve::new(&t, a, b) else { return Ok(()) };
        let tr = e.trace();
        prop_assert!((tr * tr) as u64 <= 4 * p);
        prop_assume!(n % p != 0);
        if let Some(lvl) = torsion_level(&e, n) {
            let (pp, qq) = torsion_basis(&e, n, lvl).unwrap();
            let f = e.field(lvl);
            let z = weil_pairing(&e, &pp, &qq, n).unwrap();
            prop_assert_eq!(f.order_dividing(z, n as u128), n as u128);
        }
    }
}
