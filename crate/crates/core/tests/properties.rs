use kempkit::isoperimetry::{boundary, check_duality, kappa_value, strong_iso_selection};
use kempkit::kemperman::{
    build_certificate_with, check_condition_i, classify_all, search_condition_ii_critical, verify_certificate_with,
    Sp4Rule,
};
use kempkit::wire::{certificate_from_json, certificate_json, compact_set_from_json, compact_set_json};
use kempkit::{Group, GroupSubset};
use proptest::prelude::*;

const SPECS: &[&str] =
    &["Z2", "Z5", "Z6", "Z7", "Z8", "Z2xZ2", "Z2xZ4", "Z3xZ3", "Z2xZ2xZ2", "Z10", "Z11", "Z2xZ6", "Z12"];

/// A group from `SPECS` with `count` nonempty subsets of it.
fn group_and_sets(count: usize) -> impl Strategy<Value = (Group, Vec<GroupSubset>)> {
    prop::sample::select(SPECS).prop_flat_map(move |spec| {
        let g = Group::parse(spec).unwrap();
        let full = g.full_mask();
        prop::collection::vec(1..=full, count).prop_map(move |masks| {
            let sets = masks.iter().map(|&m| GroupSubset::new(&g, m).unwrap()).collect();
            (g.clone(), sets)
        })
    })
}

/// A set containing 0 that generates its group.
fn connection_set() -> impl Strategy<Value = (Group, GroupSubset, GroupSubset)> {
    group_and_sets(2).prop_filter_map("S must generate G", |(g, sets)| {
        let s = sets[0].union(&GroupSubset::singleton(&g, g.zero())).unwrap();
        g.subgroup_generated(&s).is_whole().then(|| (g, s, sets[1].clone()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sumset_is_commutative_and_associative((_g, s) in group_and_sets(3)) {
        let (a, b, c) = (&s[0], &s[1], &s[2]);
        prop_assert_eq!(a.sumset(b).unwrap(), b.sumset(a).unwrap());
        let left = a.sumset(b).unwrap().sumset(c).unwrap();
        let right = a.sumset(&b.sumset(c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn sumset_commutes_with_translation((g, s) in group_and_sets(2), t in 0usize..12) {
        let x = g.element(t % g.order()).unwrap();
        let (a, b) = (&s[0], &s[1]);
        prop_assert_eq!(a.translate(x).sumset(b).unwrap(), a.sumset(b).unwrap().translate(x));
        let sum = a.sumset(b).unwrap().len();
        prop_assert!(sum >= a.len().max(b.len()));
    }

    #[test]
    fn representation_counts_add_up((_g, s) in group_and_sets(2)) {
        let (a, b) = (&s[0], &s[1]);
        let counts = a.rep_counts(b).unwrap();
        prop_assert_eq!(counts.iter().sum::<usize>(), a.len() * b.len());
        let support = counts.iter().filter(|&&c| c > 0).count();
        prop_assert_eq!(support, a.sumset(b).unwrap().len());
    }

    #[test]
    fn period_is_the_stabiliser((_g, s) in group_and_sets(1)) {
        let a = &s[0];
        let h = a.period().unwrap();
        prop_assert!(h.stabilizes(a));
        prop_assert_eq!(a.sumset(h.carrier()).unwrap(), a.clone());
        prop_assert_eq!(a.len() % h.order(), 0);
        for k in h.group().subgroups() {
            if k.stabilizes(a) {
                prop_assert!(k.is_subgroup_of(&h));
            }
        }
    }

    #[test]
    fn kneser_inequality((_g, s) in group_and_sets(2)) {
        let (a, b) = (&s[0], &s[1]);
        let sum = a.sumset(b).unwrap();
        let h = sum.period().unwrap();
        let ah = a.sumset(h.carrier()).unwrap().len();
        let bh = b.sumset(h.carrier()).unwrap().len();
        prop_assert!(sum.len() + h.order() >= ah + bh);
    }

    #[test]
    fn decompositions_rebuild_the_set((g, s) in group_and_sets(1)) {
        let a = &s[0];
        for h in g.subgroups() {
            for d in a.quasi_periodic_decompositions(&h).unwrap() {
                prop_assert_eq!(d.whole(), a.clone());
                prop_assert!(d.check(a).is_ok());
                prop_assert!(h.stabilizes(&d.periodic));
            }
        }
    }

    #[test]
    fn condition_i_pairs_get_verified_certificates((_g, s) in group_and_sets(2)) {
        let (a, b) = (&s[0], &s[1]);
        let ci = check_condition_i(a, b).unwrap();
        if ci.holds {
            let cert = build_certificate_with(a, b, Sp4Rule::AnyOrder).unwrap();
            prop_assert!(verify_certificate_with(&cert, Sp4Rule::AnyOrder).is_ok());
            prop_assert_eq!(cert.a.whole(), a.clone());
            prop_assert_eq!(cert.b.whole(), b.clone());
            let back = certificate_from_json(&certificate_json(&cert), 24).unwrap();
            prop_assert_eq!(back, cert);
        } else {
            prop_assert!(search_condition_ii_critical(a, b, Sp4Rule::AnyOrder).unwrap().is_none());
        }
    }

    #[test]
    fn classifications_verify((_g, s) in group_and_sets(2)) {
        let (a, b) = (&s[0], &s[1]);
        for rule in [Sp4Rule::PrimeOrder, Sp4Rule::AnyOrder] {
            for pair in classify_all(a, b, rule).unwrap() {
                prop_assert!(pair.verify_with(a, b, rule).is_ok());
            }
        }
    }

    #[test]
    fn duality_holds((_g, s, x) in connection_set()) {
        prop_assert!(check_duality(&s, &x).unwrap());
    }

    #[test]
    fn connectivity_bounds((g, s, x) in connection_set()) {
        let (separable, k1) = kappa_value(&s, 1).unwrap();
        if separable {
            // Olson: 2 kappa_1 >= |S|; a singleton gives kappa_1 <= |S| - 1.
            prop_assert!(2 * k1 >= s.len());
            prop_assert!(k1 < s.len());
            let xs = x.sumset(&s).unwrap().len();
            if xs < g.order() {
                prop_assert!(boundary(&s, &x).unwrap().len() >= k1);
            }
            let k = k1.min(x.len()).min(g.order() - x.len());
            let picks = strong_iso_selection(&s, &x, k).unwrap();
            prop_assert_eq!(picks.len(), k);
            for (i, &(xi, yi)) in picks.iter().enumerate() {
                prop_assert!(x.contains(xi) && !x.contains(yi));
                prop_assert!(s.contains(g.sub(yi, xi)));
                for &(xj, yj) in &picks[..i] {
                    prop_assert!(xi != xj && yi != yj);
                }
            }
        } else {
            prop_assert_eq!(k1, g.order() - 1);
        }
    }

    #[test]
    fn set_encodings_round_trip((g, s) in group_and_sets(1)) {
        let a = &s[0];
        prop_assert_eq!(GroupSubset::parse(&g, &a.to_string()).unwrap(), a.clone());
        prop_assert_eq!(compact_set_from_json(&compact_set_json(a), 24).unwrap(), a.clone());
    }
}
