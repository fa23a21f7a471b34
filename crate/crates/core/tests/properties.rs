use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jtcalc_core::fields::{rank, FiniteField, Matrix};
use jtcalc_core::jordan::{
    all_types, dominance_leq, jt_of_nilpotent, jt_power, jt_rank, jt_sum, jt_tensor, JordanType,
};
use jtcalc_core::modules::ModuleExpr;
use jtcalc_core::strata::{random_commuting_tuple, random_invertible};
use jtcalc_core::theta::{conjugate_tuple, jt_at_point, scale_tuple, Variant};

fn pick(p: u32, m: usize) -> impl Strategy<Value = JordanType> {
    prop::sample::select(all_types(p, m))
}

fn typed(max_m: usize) -> impl Strategy<Value = JordanType> {
    (prop::sample::select(vec![2u32, 3, 5]), 1..=max_m).prop_flat_map(|(p, m)| pick(p, m))
}

fn triple() -> impl Strategy<Value = (JordanType, JordanType, JordanType)> {
    (prop::sample::select(vec![3u32, 5]), 1..=7usize).prop_flat_map(|(p, m)| (pick(p, m), pick(p, m), pick(p, m)))
}

fn rank_seq(a: &JordanType) -> Vec<usize> {
    (1..a.p()).map(|s| jt_rank(a, s).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dominance_is_a_partial_order((a, b, c) in triple()) {
        prop_assert!(dominance_leq(&a, &a).unwrap());
        if dominance_leq(&a, &b).unwrap() && dominance_leq(&b, &a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if dominance_leq(&a, &b).unwrap() && dominance_leq(&b, &c).unwrap() {
            prop_assert!(dominance_leq(&a, &c).unwrap());
        }
    }

    #[test]
    fn dominance_matches_rank_inequalities((a, b, _c) in triple()) {
        let (ra, rb) = (rank_seq(&a), rank_seq(&b));
        let by_ranks = ra.iter().zip(&rb).all(|(x, y)| x <= y);
        prop_assert_eq!(dominance_leq(&a, &b).unwrap(), by_ranks);
    }

    #[test]
    fn ranks_of_conjugated_realizations(a in typed(8), seed in any::<u64>()) {
        let f = FiniteField::prime(a.p()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_invertible(&f, a.dim(), &mut rng);
        let gi = jtcalc_core::fields::inverse(&f, &g).unwrap();
        let n = g.mul(&f, &a.realize(&f)).mul(&f, &gi);
        for s in 1..a.p() {
            prop_assert_eq!(rank(&f, &n.pow(&f, s as u64)), jt_rank(&a, s).unwrap());
        }
        prop_assert_eq!(jt_of_nilpotent(&f, &n).unwrap(), a);
    }

    #[test]
    fn powers_match_matrix_powers(a in typed(9), j in 1u32..5) {
        prop_assume!(j < a.p());
        let f = FiniteField::prime(a.p()).unwrap();
        let n = a.realize(&f).pow(&f, j as u64);
        prop_assert_eq!(jt_power(&a, j).unwrap(), jt_of_nilpotent(&f, &n).unwrap());
    }

    #[test]
    fn tensor_matches_kronecker_sum(
        (a, b) in (prop::sample::select(vec![2u32, 3, 5]), 1..=5usize, 1..=5usize)
            .prop_flat_map(|(p, m, n)| (pick(p, m), pick(p, n)))
    ) {
        let f = FiniteField::prime(a.p()).unwrap();
        let (na, nb) = (a.realize(&f), b.realize(&f));
        let ia = Matrix::identity(&f, a.dim());
        let ib = Matrix::identity(&f, b.dim());
        let k = na.kron(&f, &ib).add(&f, &ia.kron(&f, &nb));
        let t = jt_tensor(&a, &b).unwrap();
        prop_assert_eq!(&t, &jt_of_nilpotent(&f, &k).unwrap());
        prop_assert_eq!(t, jt_tensor(&b, &a).unwrap());
    }

    #[test]
    fn tensor_is_associative(
        (a, b, c) in (prop::sample::select(vec![2u32, 3]), 1..=3usize, 1..=3usize, 1..=3usize)
            .prop_flat_map(|(p, x, y, z)| (pick(p, x), pick(p, y), pick(p, z)))
    ) {
        let left = jt_tensor(&jt_tensor(&a, &b).unwrap(), &c).unwrap();
        let right = jt_tensor(&a, &jt_tensor(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}

const EXPRS: [&str; 4] = ["Std(2)", "Sym(2,Std(2))", "Std(2)*Tw(1,Std(2))", "Ext(2,Std(3))"];

fn point_strategy() -> impl Strategy<Value = (u32, usize, u64)> {
    (prop::sample::select(vec![3u32, 5]), 1..=3usize, any::<u64>())
}

fn module(s: &str) -> ModuleExpr {
    ModuleExpr::parse(s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn direct_sums_add_types((p, r, seed) in point_strategy(), i in 0..4usize, k in 0..4usize) {
        let (x, y) = (EXPRS[i], EXPRS[k]);
        let n = module(x).std_size().unwrap().or(module(y).std_size().unwrap()).unwrap();
        prop_assume!(module(y).std_size().unwrap() == Some(n) && module(x).std_size().unwrap() == Some(n));
        let f = FiniteField::prime(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_commuting_tuple(&f, n, r, &mut rng).unwrap();
        for v in [Variant::Full, Variant::Exp] {
            let sum = jt_at_point(&f, &module(&format!("{x}+{y}")), &t, v).unwrap();
            let parts = jt_sum(&jt_at_point(&f, &module(x), &t, v).unwrap(), &jt_at_point(&f, &module(y), &t, v).unwrap()).unwrap();
            prop_assert_eq!(sum, parts);
        }
    }

    #[test]
    fn duals_and_twists((p, r, seed) in point_strategy(), i in 0..3u32, j in 0..3u32) {
        let f = FiniteField::prime(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_commuting_tuple(&f, 2, r, &mut rng).unwrap();
        let base = "Sym(2,Std(2))";
        let jt = |s: &str| jt_at_point(&f, &module(s), &t, Variant::Full).unwrap();
        prop_assert_eq!(jt(&format!("Dual(Dual({base}))")), jt(base));
        prop_assert_eq!(jt(&format!("Dual({base})")), jt(base));
        prop_assert_eq!(jt(&format!("Tw({i},Tw({j},{base}))")), jt(&format!("Tw({},{base})", i + j)));
    }

    #[test]
    fn invariance_under_scaling_and_conjugation((p, r, seed) in point_strategy(), e in 0..4usize) {
        let e = module(EXPRS[e]);
        let n = e.std_size().unwrap().unwrap();
        let f = FiniteField::new(p, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_commuting_tuple(&f, n, r, &mut rng).unwrap();
        let alpha = f.random_nonzero(&mut rng);
        let g = random_invertible(&f, n, &mut rng);
        for v in [Variant::Full, Variant::Exp] {
            let want = jt_at_point(&f, &e, &t, v).unwrap();
            prop_assert_eq!(&jt_at_point(&f, &e, &scale_tuple(&f, &t, &alpha), v).unwrap(), &want);
            prop_assert_eq!(&jt_at_point(&f, &e, &conjugate_tuple(&f, &t, &g).unwrap(), v).unwrap(), &want);
        }
    }
}
