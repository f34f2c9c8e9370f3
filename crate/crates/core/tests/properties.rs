//! Cross-module properties exercised through the public API.

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use unilab_core::connectivity::{chain_components, find_chain, is_chain_connected, separated_split};
use unilab_core::exact::{pow_le_sum, rat};
use unilab_core::groups::{generated_subgroup, relation_left, subgroup_check};
use unilab_core::random::Gen;
use unilab_core::scalars::{padic_valuation, AbsoluteValue};
use unilab_core::{ElementSet, FiniteGroup, QParam, Rational, Relation};

fn rational() -> impl Strategy<Value = Rational> {
    (-400i64..=400, 1i64..=400).prop_map(|(a, b)| Rational::new(BigInt::from(a), BigInt::from(b)))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |x| *x != rat(0, 1))
}

proptest! {
    #[test]
    fn compose_is_associative_with_identity(seed in any::<u64>(), n in 1usize..7) {
        let mut g = Gen::new(seed);
        let (u, v, w) = (g.relation(n), g.relation(n), g.relation(n));
        let left = u.compose(&v).unwrap().compose(&w).unwrap();
        prop_assert_eq!(left, u.compose(&v.compose(&w).unwrap()).unwrap());
        let d = Relation::diagonal(n);
        prop_assert_eq!(&u.compose(&d).unwrap(), &u);
        prop_assert_eq!(&d.compose(&u).unwrap(), &u);
        prop_assert_eq!(&u.inverse().inverse(), &u);
        let a = g.subset(n);
        let uv = u.compose(&v).unwrap();
        prop_assert_eq!(uv.image(&a).unwrap(), v.image(&u.image(&a).unwrap()).unwrap());
    }

    #[test]
    fn chains_reach_exactly_the_closure(seed in any::<u64>(), n in 1usize..8) {
        let mut g = Gen::new(seed);
        let u = g.reflexive_symmetric(n);
        let hat = u.hat_closure().unwrap();
        prop_assert!(hat.classify().is_equivalence && u.is_subset(&hat));
        let comps = chain_components(&ElementSet::full(n), &u).unwrap();
        for x in 0..n {
            for y in 0..n {
                let same = comps.iter().any(|c| c.contains(x) && c.contains(y));
                prop_assert_eq!(same, hat.contains(x, y));
                prop_assert_eq!(find_chain(x, y, &u).unwrap().is_some(), same);
            }
        }
    }

    #[test]
    fn split_exists_iff_not_chain_connected(seed in any::<u64>(), n in 1usize..6) {
        let mut g = Gen::new(seed);
        let b = g.base(n);
        let e = g.subset(n);
        let cc = is_chain_connected(&e, &b);
        prop_assert_eq!(cc.connected, separated_split(&e, &b).is_none());
        prop_assert_eq!(cc.connected, b.topology().unwrap().is_connected(&e));
    }

    #[test]
    fn entourages_compose_within_sum_of_radii(seed in any::<u64>(), n in 1usize..7) {
        let mut g = Gen::new(seed);
        let d = g.semimetric(n);
        let r1 = g.rational(6).abs() + rat(1, 7);
        let r2 = g.rational(6).abs() + rat(1, 9);
        let lhs = d.entourage(&r1).compose(&d.entourage(&r2)).unwrap();
        prop_assert!(lhs.is_subset(&d.entourage(&(&r1 + &r2))));
        let u = g.ultrametric(n);
        for r in u.canonical_radii() {
            prop_assert!(u.entourage(&r).classify().is_equivalence);
        }
    }

    #[test]
    fn closure_is_intersection_of_neighborhoods(seed in any::<u64>(), n in 1usize..6) {
        let mut g = Gen::new(seed);
        let b = g.base(n);
        let t = b.topology().unwrap();
        for a in ElementSet::all_subsets(n) {
            prop_assert_eq!(b.closure(&a), t.closure(&a));
            prop_assert_eq!(b.interior(&a), t.interior(&a));
        }
        let meet = b.elements().iter().fold(Relation::full(n), |acc, u| acc.intersection(u).unwrap());
        prop_assert_eq!(t.is_hausdorff(), meet == Relation::diagonal(n));
    }

    #[test]
    fn padic_absolute_value_is_multiplicative_and_ultrametric(
        x in nonzero_rational(), y in nonzero_rational(), pi in 0usize..4
    ) {
        let p = [2u64, 3, 5, 7][pi];
        let av = AbsoluteValue::padic(p).unwrap();
        prop_assert_eq!(
            padic_valuation(p, &(&x * &y)).unwrap(),
            padic_valuation(p, &x).unwrap() + padic_valuation(p, &y).unwrap()
        );
        prop_assert_eq!(av.eval(&(&x * &y)).base, av.eval(&x).base * av.eval(&y).base);
        let (ax, ay) = (av.eval(&x), av.eval(&y));
        let sum = av.eval(&(&x + &y));
        prop_assert!(sum <= ax.clone().max(ay.clone()));
        if ax != ay {
            prop_assert_eq!(sum, ax.max(ay));
        }
    }

    #[test]
    fn ultrametric_inequality_implies_every_finite_level(
        a in 0i64..50, b in 0i64..50, c in 0i64..50, p in 1i64..5, q in 1i64..4
    ) {
        // a ≤ max(b, c) forces a^e ≤ b^e + c^e for every e > 0
        if a <= b.max(c) {
            prop_assert!(pow_le_sum(&rat(a, 1), &rat(b, 1), &rat(c, 1), &rat(p, q)));
        }
    }

    #[test]
    fn generated_subgroups_are_subgroups(seed in any::<u64>(), which in 0usize..4) {
        let grp = [FiniteGroup::cyclic(10), FiniteGroup::symmetric(4), FiniteGroup::dihedral(5), FiniteGroup::quaternion()]
            [which].clone();
        let mut g = Gen::new(seed);
        let w = g.subset(grp.size());
        let h = generated_subgroup(&grp, &w).unwrap().subgroup;
        prop_assert!(w.is_subset(&h));
        prop_assert!(subgroup_check(&grp, &h).unwrap().is_subgroup);
        prop_assert!(relation_left(&grp, &h).unwrap().classify().is_equivalence);
    }
}

#[test]
fn level_parameters_parse_and_order() {
    let two = QParam::parse("q:2").unwrap();
    assert!(QParam::one() < two && two < QParam::Inf);
    assert_eq!(QParam::parse("inf").unwrap(), QParam::Inf);
}
