use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use super::kronecker::{ray_series, stable_chi_from_table};
use super::*;
use crate::duality::{euler_factorize, funceq_solve, FuncEqForm};
use crate::rational::{int, ratio};
use crate::Stability;

fn lp(v: &[u32]) -> LatticePoint {
    LatticePoint::new(v.to_vec())
}

fn poly2(bound: u32, terms: &[((u32, u32), i64)]) -> TruncatedSeries {
    TruncatedSeries::from_terms(2, bound, terms.iter().map(|&((a, b), c)| (lp(&[a, b]), int(c)))).unwrap()
}

fn x(bound: u32) -> TruncatedSeries {
    TruncatedSeries::variable(2, bound, 0)
}

fn y(bound: u32) -> TruncatedSeries {
    TruncatedSeries::variable(2, bound, 1)
}

#[test]
fn bracket_examples() {
    for m in 1..4 {
        let skew = kronecker_skew(m);
        let b = poisson_bracket(&x(6), &y(6), &skew, 6).unwrap();
        assert_eq!(b, poly2(6, &[((1, 1), m as i64)]));
        assert!(poisson_bracket(&x(6), &x(6), &skew, 6).unwrap().is_zero());
        let x2 = &x(6) * &x(6);
        assert_eq!(poisson_bracket(&x2, &y(6), &skew, 6).unwrap(), poly2(6, &[((2, 1), 2 * m as i64)]));
    }
    let bad = vec![vec![0, 1], vec![1, 0]];
    assert!(poisson_bracket(&x(3), &y(3), &bad, 3).is_err());
}

#[test]
fn vertex_automorphisms() {
    for m in 1..4u32 {
        let t = t_i_automorphism(&Quiver::kronecker(m), 0, 5).unwrap();
        assert_eq!(t.multiplier(0), &TruncatedSeries::one(2, 5));
        let expected = (&TruncatedSeries::one(2, 5) + &x(5)).pow_int(i64::from(m)).unwrap();
        assert_eq!(t.multiplier(1), &expected);
    }
    let free = Quiver::from_arrows(3, &[]).unwrap();
    for i in 0..3 {
        assert_eq!(t_i_automorphism(&free, i, 4).unwrap(), PoissonAutomorphism::identity(3, 4));
    }
    // A_2, 1 -> 2: {1,2} = −1, {2,1} = 1
    let a2 = Quiver::linear(2);
    let one = TruncatedSeries::one(2, 4);
    let t1 = t_i_automorphism(&a2, 0, 4).unwrap();
    assert_eq!(t1.multiplier(1), &(&one + &x(4)).pow_int(-1).unwrap());
    let t2 = t_i_automorphism(&a2, 1, 4).unwrap();
    assert_eq!(t2.multiplier(0), &(&one + &y(4)));
}

#[test]
fn tab_examples() {
    for m in 1..5u32 {
        let t = t_ab_automorphism(m, 1, 0, 6).unwrap();
        let one = TruncatedSeries::one(2, 6);
        assert_eq!(t.multiplier(0), &one);
        assert_eq!(t.multiplier(1), &(&one - &x(6)).pow_int(i64::from(m)).unwrap());

        let identity = t_abf_automorphism(m, 2, 1, &TruncatedSeries::one(1, 6), 6).unwrap();
        assert_eq!(identity, PoissonAutomorphism::identity(2, 6));
    }
    for m in [1u32, 3, 5] {
        let t = t_ab_automorphism(m, 1, 1, 6).unwrap();
        let one = TruncatedSeries::one(2, 6);
        let base = &one + &(&x(6) * &y(6));
        assert_eq!(t.multiplier(0), &base.pow_int(-i64::from(m)).unwrap());
        assert_eq!(t.multiplier(1), &base.pow_int(i64::from(m)).unwrap());
    }
    assert!(t_ab_automorphism(1, 0, 0, 4).is_err());
}

#[test]
fn identity_is_neutral() {
    let t = t_ab_automorphism(2, 1, 2, 6).unwrap();
    let id = PoissonAutomorphism::identity(2, 6);
    assert_eq!(id.compose(&t).unwrap(), t);
    assert_eq!(t.compose(&id).unwrap(), t);
    assert_eq!(t.compose(&t.inverse().unwrap()).unwrap(), id);
    assert_eq!(t.inverse().unwrap().compose(&t).unwrap(), id);
}

#[test]
fn composition_is_function_composition() {
    let s = t_ab_automorphism(1, 1, 0, 5).unwrap();
    let t = t_ab_automorphism(1, 0, 1, 5).unwrap();
    let f = poly2(5, &[((1, 0), 2), ((1, 2), -1), ((0, 3), 1)]);
    let st = s.compose(&t).unwrap();
    assert_eq!(st.apply(&f).unwrap(), s.apply(&t.apply(&f).unwrap()).unwrap());
}

#[test]
fn pentagon() {
    let t = |a, b| t_ab_automorphism(1, a, b, 6).unwrap();
    let lhs = t(1, 0).compose(&t(0, 1)).unwrap();
    let rhs = t(0, 1).compose(&t(1, 1)).unwrap().compose(&t(1, 0)).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn pentagon_table() {
    let table = kronecker_factorize(1, 8).unwrap();
    for ((a, b), d) in table.entries() {
        let expected = i64::from(matches!((a, b), (1, 0) | (0, 1) | (1, 1)));
        assert_eq!(d, &int(expected), "({a},{b})");
    }
    assert_eq!(table.entries().count(), 44);
}

#[test]
fn small_kronecker_tables() {
    let t2 = kronecker_factorize(2, 8).unwrap();
    assert_eq!(t2.get(1, 1), int(-2));
    assert_eq!(t2.get(1, 2), int(1));
    assert_eq!(t2.get(2, 1), int(1));
    let t3 = kronecker_factorize(3, 8).unwrap();
    assert_eq!(t3.get(1, 1), int(3));
    assert_eq!(t3.get(2, 2), int(-6));
    for m in 1..=5 {
        let t = kronecker_factorize(m, 5).unwrap();
        assert_eq!((t.get(1, 0), t.get(0, 1)), (int(1), int(1)));
        assert_eq!(t.first_non_integral(), None);
    }
}

#[test]
fn diagonal_formula() {
    assert_eq!(diagonal_closed_form(3, 1).unwrap(), int(3));
    assert_eq!(diagonal_closed_form(3, 2).unwrap(), int(-6));
    assert_eq!(diagonal_closed_form(4, 1).unwrap(), int(-4));
    assert!(diagonal_closed_form(2, 1).is_err());
    let table = kronecker_factorize(4, 6).unwrap();
    for k in 1..=3 {
        assert_eq!(table.get(k, k), diagonal_closed_form(4, k).unwrap());
    }
}

#[test]
fn stable_chi_examples() {
    for m in [3u32, 4] {
        let chi = kronecker_stable_chi(m, (1, 1), 6).unwrap();
        let expected: BTreeMap<u32, BigInt> = [(1, m as i64), (2, 0), (3, 0)].iter().map(|&(k, c)| (k, c.into())).collect();
        assert_eq!(chi, expected);
    }
    for m in 1..=4 {
        let chi = kronecker_stable_chi(m, (1, 0), 4).unwrap();
        let expected: BTreeMap<u32, BigInt> = (1..=4).map(|k| (k, BigInt::from(i64::from(k == 1)))).collect();
        assert_eq!(chi, expected);
    }
    let chi = kronecker_stable_chi(2, (1, 1), 6).unwrap();
    let expected: BTreeMap<u32, BigInt> = [(1, 2), (2, 0), (3, 0)].iter().map(|&(k, c)| (k, BigInt::from(c))).collect();
    assert_eq!(chi, expected);
    assert!(kronecker_stable_chi(3, (2, 2), 6).is_err());
}

#[test]
fn n_zero_reading_agrees_with_extraction() {
    let table = kronecker_factorize(2, 8).unwrap();
    let g = ray_series(&table, (1, 1)).unwrap();
    let form = crate::duality::funceq_extract(&g, 0).unwrap();
    let direct = stable_chi_from_table(&table, (1, 1)).unwrap();
    for (k, chi) in direct.chi {
        assert_eq!(-form.b(k), BigRational::from_integer(chi));
    }
}

#[test]
fn dual_consistency() {
    for m in 1..=3u32 {
        let table = kronecker_factorize(m, 8).unwrap();
        for (a, b) in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (3, 1), (1, 3)] {
            let chi = stable_chi_from_table(&table, (a, b)).unwrap();
            let n = i64::from(m * a * b) - i64::from(a * a + b * b);
            let form = FuncEqForm::new(n, chi.chi.iter().map(|(&k, c)| (k, -BigRational::from_integer(c.clone()))).collect());
            let top = 8 / (a + b);
            let euler = euler_factorize(&funceq_solve(&form, top).unwrap(), n).unwrap();
            for k in 1..=top {
                assert_eq!(euler.a(k), -table.get(k * a, k * b), "m {m} ray ({a},{b}) k {k}");
            }
        }
    }
}

#[test]
fn fixed_slope_factors_commute() {
    for m in 1..=4 {
        for (a, b) in [(1, 0), (1, 1), (1, 2), (2, 1)] {
            let t1 = t_ab_automorphism(m, a, b, 8).unwrap();
            let t2 = t_ab_automorphism(m, 2 * a, 2 * b, 8).unwrap();
            assert_eq!(t1.compose(&t2).unwrap(), t2.compose(&t1).unwrap());
        }
    }
}

#[test]
fn ray_factor_is_product_of_powers() {
    let m = 3;
    let exps = BTreeMap::from([(1, int(2)), (2, int(-1))]);
    let ray = ray_factor(m, 1, 2, &exps, 9).unwrap();
    let direct = t_ab_automorphism(m, 1, 2, 9)
        .unwrap()
        .pow(2)
        .unwrap()
        .compose(&t_ab_automorphism(m, 2, 4, 9).unwrap().pow(-1).unwrap())
        .unwrap();
    assert_eq!(ray, direct);
}

#[test]
fn brackets_are_preserved() {
    for m in 1..=3u32 {
        let skew = kronecker_skew(m);
        let table = kronecker_factorize(m, 6).unwrap();
        for t in table.factors().unwrap() {
            assert!(t.preserves_bracket(&skew).unwrap());
        }
        assert!(table.ordered_product().unwrap().preserves_bracket(&skew).unwrap());
        let f = TruncatedSeries::univariate_int(6, &[1, 2, -1, 3]);
        assert!(t_abf_automorphism(m, 1, 1, &f, 6).unwrap().preserves_bracket(&skew).unwrap());
    }
    let q = Quiver::from_arrows(3, &[(0, 1), (0, 1), (1, 2), (0, 2)]).unwrap();
    for i in 0..3 {
        assert!(t_i_automorphism(&q, i, 5).unwrap().preserves_bracket(&q.skew_matrix()).unwrap());
    }
    // a multiplier that is not Poisson
    let bad = PoissonAutomorphism::new(vec![&TruncatedSeries::one(2, 4) + &x(4), TruncatedSeries::one(2, 4)]).unwrap();
    assert!(!bad.preserves_bracket(&kronecker_skew(1)).unwrap());
}

#[test]
fn sign_flip_round_trip() {
    let t = t_ab_automorphism(3, 2, 1, 6).unwrap();
    assert_eq!(t.sign_flip().sign_flip(), t);
    let s = t_ab_automorphism(3, 1, 1, 6).unwrap();
    assert_eq!(
        t.compose(&s).unwrap().sign_flip(),
        t.sign_flip().compose(&s.sign_flip()).unwrap()
    );
}

#[test]
fn quiver_without_arrows_factorizes_trivially() {
    let q = Quiver::from_arrows(2, &[]).unwrap();
    let f = quiver_factorize(&q, &Stability::new(vec![1, 0]), 5).unwrap();
    assert!(f.slopes().values().all(|family| quiver_factorization::is_unit_family(family)));
}

#[test]
fn kronecker_from_quiver_factorization() {
    for m in 1..=3 {
        let q = Quiver::kronecker(m);
        let bound = 6;
        let f = quiver_factorize(&q, &Stability::dual_vertex(2, 1), bound).unwrap();
        let table = kronecker_factorize(m, bound).unwrap();
        let vertex = quiver_factorization::vertex_product(&q, bound).unwrap();
        assert_eq!(vertex.sign_flip(), kronecker::kronecker_target(m, bound).unwrap());
        for mu in f.slopes().keys() {
            // primitive (a,b) with b/(a+b) = mu
            let a = (mu.denom() - mu.numer()).try_into().unwrap();
            let b = mu.numer().try_into().unwrap();
            let exps = (1..=bound / (a + b)).map(|k| (k, table.get(k * a, k * b))).collect();
            let expected = ray_factor(m, a, b, &exps, bound).unwrap();
            assert_eq!(f.automorphism(mu).unwrap().sign_flip(), expected, "m {m}, mu {mu}");
        }
    }
}

fn swap(t: &PoissonAutomorphism) -> PoissonAutomorphism {
    let bound = t.bound();
    let args = [y(bound), x(bound)];
    PoissonAutomorphism::new(vec![
        t.multiplier(1).substitute(&args).unwrap(),
        t.multiplier(0).substitute(&args).unwrap(),
    ])
    .unwrap()
}

#[test]
fn a2_is_pentagon() {
    let bound = 6;
    let a2 = Quiver::linear(2);
    let f = quiver_factorize(&a2, &Stability::dual_vertex(2, 0), bound).unwrap();
    let nontrivial: Vec<_> = f
        .slopes()
        .iter()
        .filter(|(_, family)| !quiver_factorization::is_unit_family(family))
        .map(|(mu, _)| mu.clone())
        .collect();
    assert_eq!(nontrivial, vec![int(0), ratio(1, 2), int(1)]);
    // vertex 2 of A_2 plays the role of i in K_1
    let table = kronecker_factorize(1, bound).unwrap();
    for (a, b) in [(1u32, 0u32), (1, 1), (0, 1)] {
        let mu_a2 = ratio(i64::from(b), i64::from(a + b));
        let t = swap(&f.automorphism(&mu_a2).unwrap()).sign_flip();
        let exps = BTreeMap::from([(1, table.get(a, b))]);
        assert_eq!(t, ray_factor(1, a, b, &exps, bound).unwrap());
    }
}

fn arb_automorphism() -> impl Strategy<Value = PoissonAutomorphism> {
    (1u32..=3, 0u32..=2, 0u32..=2, -2i64..=2).prop_filter_map("a+b>0", |(m, a, b, e)| {
        (a + b > 0).then(|| t_ab_automorphism(m, a, b, 5).unwrap().pow(e).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn composition_is_associative(s in arb_automorphism(), t in arb_automorphism(), u in arb_automorphism()) {
        let left = s.compose(&t).unwrap().compose(&u).unwrap();
        let right = s.compose(&t.compose(&u).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}

#[test]
fn primitive_ray_listing() {
    assert_eq!(primitive_rays(3), vec![(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)]);
}

#[test]
fn every_ray_has_integral_chi() {
    for m in 1..=5 {
        let table = kronecker_factorize(m, 8).unwrap();
        let all = stable_chi_all(&table).unwrap();
        assert_eq!(all.len(), primitive_rays(8).len());
    }
}

#[test]
fn diagonal_check_agrees() {
    let table = kronecker_factorize(3, 8).unwrap();
    let check = diagonal_check(&table).unwrap();
    assert_eq!(check.len(), 4);
    assert!(check.iter().all(DiagonalEntry::agrees));
    assert!(diagonal_check(&kronecker_factorize(2, 4).unwrap()).is_err());
}
