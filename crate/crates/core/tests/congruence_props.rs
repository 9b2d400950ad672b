use gencl::congruence::{exact_sequence_audit, gen_class_group, LambdaSet, Modulus};
use gencl::quadforms::{class_number, order_from_disc, splitting_type, QuadIdeal, SplitType};
use proptest::prelude::*;

const CHAIN: [LambdaSet; 4] =
    [LambdaSet::UnitOnly, LambdaSet::IntegerPowers(2), LambdaSet::Integers, LambdaSet::FullOrder];

#[test]
fn squares_of_integers_at_inert_prime() {
    // f ≡ 1 (mod 4) inert, units {±1}: |Cl_H| = 2(f+1)h
    for (d, f) in [(-7i64, 5i64), (-8, 5), (-20, 13), (-44, 13), (-23, 5)] {
        let o = order_from_disc(d).unwrap();
        assert!(matches!(splitting_type(&o, f).unwrap(), SplitType::Inert(_)));
        let m = Modulus::scalar(&o, f).unwrap();
        let g = gen_class_group(&o, &m, LambdaSet::IntegerPowers(2)).unwrap();
        assert_eq!(g.len(), 2 * (f as usize + 1) * class_number(&o), "D = {d}, f = {f}");
    }
}

#[test]
fn larger_lambda_gives_quotient() {
    for (d, n) in [(-4i64, 3i64), (-44, 3), (-7, 5), (-3, 7), (-56, 9)] {
        let o = order_from_disc(d).unwrap();
        let m = Modulus::scalar(&o, n).unwrap();
        let groups: Vec<_> = CHAIN.iter().map(|l| gen_class_group(&o, &m, *l).unwrap()).collect();
        for w in groups.windows(2) {
            let (small, big) = (&w[0], &w[1]);
            assert_eq!(small.len() % big.len(), 0);
            let proj: Vec<usize> = small.elements.iter().map(|x| big.class_index(x).unwrap()).collect();
            let mut image = proj.clone();
            image.sort();
            image.dedup();
            assert_eq!(image.len(), big.len(), "surjective");
            for i in 0..small.len() {
                for j in 0..small.len() {
                    assert_eq!(proj[small.mul(i, j)], big.mul(proj[i], proj[j]));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn exact_sequence_holds(d_idx in 0usize..8, n in 2i64..12, l_idx in 0usize..4) {
        let d = [-3i64, -4, -7, -8, -15, -20, -23, -36][d_idx];
        let o = order_from_disc(d).unwrap();
        prop_assume!(o.coprime_to_cond(n));
        let m = Modulus::scalar(&o, n).unwrap();
        let a = exact_sequence_audit(&o, &m, CHAIN[l_idx]).unwrap();
        prop_assert!(a.pass, "{:?}", a);
        prop_assert_eq!(a.sizes.2 * a.sizes.0, a.sizes.3 * a.sizes.1);
    }

    #[test]
    fn prime_moduli(d_idx in 0usize..5, l in prop::sample::select(vec![2i64, 3, 5, 7, 11, 13])) {
        let d = [-4i64, -7, -15, -23, -47][d_idx];
        let o = order_from_disc(d).unwrap();
        let p: QuadIdeal = match splitting_type(&o, l).unwrap() {
            SplitType::Split(p, _) | SplitType::Ramified(p) | SplitType::Inert(p) => p,
        };
        let m = Modulus::new(&o, p).unwrap();
        for lam in CHAIN {
            let a = exact_sequence_audit(&o, &m, lam).unwrap();
            prop_assert!(a.pass, "{:?}", a);
            prop_assert_eq!(gen_class_group(&o, &m, lam).unwrap().len(), a.sizes.2);
        }
    }
}
