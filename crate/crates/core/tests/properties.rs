//! Randomized invariants on posets and presheaves beyond the exhaustive sizes.

use std::sync::Arc;

use proptest::prelude::*;

use etale::duality::{counit_iso, dual_of_pmorphism, unit_iso};
use etale::etale::{etale_axiom_holds, HAlgebra};
use etale::heyting::FiniteHeytingAlgebra;
use etale::poset::{FinitePoset, Subset};
use etale::presheaf::{fiber_presheaf, find_iso_over, grothendieck, product_embedding, round_trip_presheaf, Presheaf};

/// Posets on up to `max` points from random relations `i < j` on indices,
/// so every closure is antisymmetric.
fn poset(max: usize) -> impl Strategy<Value = FinitePoset> {
    (0..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            let edges: Vec<(usize, usize)> = pairs.zip(bits).filter(|(_, b)| *b).map(|(p, _)| p).collect();
            let labels = (0..n).map(|i| format!("p{i}")).collect();
            FinitePoset::from_covers(labels, &edges).expect("index order is acyclic")
        })
    })
}

/// Presheaves with fibers of size 1 or 2 and random cover restrictions;
/// non-functorial choices come back as `None`.
fn presheaf(max_base: usize) -> impl Strategy<Value = Option<Presheaf>> {
    poset(max_base)
        .prop_flat_map(|x| {
            let n = x.len();
            let covers = x.covers().len();
            (Just(x), proptest::collection::vec(1..=2usize, n), proptest::collection::vec(any::<[bool; 2]>(), covers))
        })
        .prop_map(|(x, sizes, choices)| {
            let given: Vec<((usize, usize), Vec<usize>)> = x
                .covers()
                .into_iter()
                .zip(choices)
                .map(|((a, b), pick)| ((a, b), (0..sizes[a]).map(|i| usize::from(pick[i]) % sizes[b]).collect()))
                .collect();
            Presheaf::from_sizes(Arc::new(x), &sizes, &given).ok()
        })
}

fn is_upset_by_definition(x: &FinitePoset, s: Subset) -> bool {
    (0..x.len()).all(|a| !s.contains(a) || (0..x.len()).all(|b| !x.leq(a, b) || s.contains(b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn upsets_are_exactly_the_closed_subsets(x in poset(7)) {
        let ups = x.all_upsets();
        let brute: Vec<Subset> = (0u64..1 << x.len()).map(Subset).filter(|&s| is_upset_by_definition(&x, s)).collect();
        prop_assert_eq!(ups.len(), brute.len());
        for &u in &ups {
            prop_assert!(is_upset_by_definition(&x, u));
            for &v in &ups {
                prop_assert!(x.is_upset(u.intersection(v)) && x.is_upset(u.union(v)));
            }
        }
    }

    #[test]
    fn upset_algebra_obeys_the_heyting_laws(x in poset(5)) {
        let a = FiniteHeytingAlgebra::upset_algebra(Arc::new(x)).unwrap();
        prop_assert!(a.verify_heyting(), "{:?}", a.heyting_law_violation());
        for u in a.elements() {
            for v in a.elements() {
                let residuals = a.elements().filter(|&w| a.leq(a.meet(w, u), v));
                prop_assert_eq!(a.implies(u, v), a.join_all(residuals));
            }
        }
    }

    #[test]
    fn unit_and_counit_are_isomorphisms(x in poset(6)) {
        let x = Arc::new(x);
        prop_assert!(unit_iso(x.clone()).unwrap().is_order_isomorphism());
        let a = Arc::new(FiniteHeytingAlgebra::upset_algebra(x).unwrap());
        prop_assert!(counit_iso(a).unwrap().is_isomorphism());
    }

    #[test]
    fn grothendieck_totals_are_strict_and_etale(f in presheaf(4)) {
        let Some(f) = f else { return Ok(()) };
        let b = grothendieck(&f).unwrap();
        prop_assert!(b.projection().is_strict_p_morphism());
        let dual = HAlgebra::new(dual_of_pmorphism(b.projection()).unwrap()).unwrap();
        prop_assert!(etale_axiom_holds(&dual));
        let again = grothendieck(&fiber_presheaf(&b).unwrap()).unwrap();
        prop_assert!(find_iso_over(&b, &again).is_some());
        prop_assert!(round_trip_presheaf(&f));
    }

    #[test]
    fn product_embedding_is_an_injective_homomorphism(f in presheaf(3)) {
        let Some(f) = f else { return Ok(()) };
        let e = product_embedding(&f).unwrap();
        prop_assert!(e.is_homomorphism() && e.is_injective());
    }
}
