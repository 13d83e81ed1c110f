//! Finite limits of bundles over a fixed base and the dual colimits.
//!
//! Limits are computed in posets: the pullback of two monotone maps is the
//! set of matching pairs with the componentwise order. Pushouts of
//! distributive lattices are computed on the dual side, as the upset lattice
//! of the pullback of the dual maps.

use std::sync::Arc;

use thiserror::Error;

use crate::duality::{
    counit_iso, dual_of_homomorphism, dual_of_lattice_homomorphism, dual_of_monotone_map, dual_of_pmorphism_with,
    DualityError,
};
use crate::etale::{is_etale, EtaleError, HAlgebra};
use crate::heyting::{FiniteHeytingAlgebra, HeytingError, HeytingHom};
use crate::poset::{FinitePoset, PosetError, PosetMap, MAX_ELEMENTS};
use crate::presheaf::{Bundle, PresheafError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("maps do not share a codomain")]
    CodomainMismatch,
    #[error("bundles do not share a base")]
    BaseMismatch,
    #[error("homomorphisms do not share a domain")]
    DomainMismatch,
    #[error("leg is not monotone")]
    NotMonotone,
    #[error("{0} H-algebra is not etale")]
    NotEtale(&'static str),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Heyting(#[from] HeytingError),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Etale(#[from] EtaleError),
}

/// `id: X → X`.
pub fn terminal_bundle(x: Arc<FinitePoset>) -> Bundle {
    Bundle::new(PosetMap::identity(x)).expect("identity is a strict p-morphism")
}

/// `left: apex → g.domain`, `right: apex → h.domain`.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub apex: Arc<FinitePoset>,
    pub left: PosetMap,
    pub right: PosetMap,
}

/// `{(y, z) | g(y) = h(z)}` ordered componentwise, pairs in lexicographic order.
pub fn poset_pullback(g: &PosetMap, h: &PosetMap) -> Result<Pullback, LimitError> {
    if !g.codomain().same_order(h.codomain()) {
        return Err(LimitError::CodomainMismatch);
    }
    if !g.is_monotone() || !h.is_monotone() {
        return Err(LimitError::NotMonotone);
    }
    let (p, q) = (g.domain(), h.domain());
    let pairs: Vec<(usize, usize)> = (0..p.len())
        .flat_map(|y| (0..q.len()).map(move |z| (y, z)))
        .filter(|&(y, z)| g.apply(y) == h.apply(z))
        .collect();
    if pairs.len() > MAX_ELEMENTS {
        return Err(PosetError::TooManyElements(pairs.len()).into());
    }
    let labels = pairs.iter().map(|&(y, z)| format!("({},{})", p.label(y), q.label(z))).collect();
    let apex = FinitePoset::from_relation(labels, |i, j| {
        let ((y1, z1), (y2, z2)) = (pairs[i], pairs[j]);
        p.leq(y1, y2) && q.leq(z1, z2)
    })?;
    let apex = Arc::new(apex);
    let left = PosetMap::new(apex.clone(), p.clone(), pairs.iter().map(|&(y, _)| y).collect())?;
    let right = PosetMap::new(apex.clone(), q.clone(), pairs.iter().map(|&(_, z)| z).collect())?;
    Ok(Pullback { apex, left, right })
}

/// The product in bundles over `X` with its two projections.
#[derive(Debug, Clone)]
pub struct BundleProduct {
    pub bundle: Bundle,
    pub pullback: Pullback,
}

pub fn bundle_product_with_legs(f1: &Bundle, f2: &Bundle) -> Result<BundleProduct, LimitError> {
    if !f1.base().same_order(f2.base()) {
        return Err(LimitError::BaseMismatch);
    }
    let pullback = poset_pullback(f1.projection(), f2.projection())?;
    let projection = f1.projection().after(&pullback.left)?;
    let bundle = Bundle::new(projection)?;
    Ok(BundleProduct { bundle, pullback })
}

pub fn bundle_product(f1: &Bundle, f2: &Bundle) -> Result<Bundle, LimitError> {
    Ok(bundle_product_with_legs(f1, f2)?.bundle)
}

/// Every monotone `g: b1.total → b2.total` with `b2 ∘ g = b1`.
pub fn maps_over(b1: &Bundle, b2: &Bundle) -> Vec<PosetMap> {
    let (t1, t2) = (b1.total(), b2.total());
    let candidates: Vec<Vec<usize>> =
        (0..t1.len()).map(|p| b2.fiber(b1.projection().apply(p)).iter().collect()).collect();
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(t1.len());
    fn go(
        t1: &FinitePoset,
        t2: &Arc<FinitePoset>,
        d: &Arc<FinitePoset>,
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
        out: &mut Vec<PosetMap>,
    ) {
        let i = images.len();
        if i == t1.len() {
            out.push(PosetMap::new(d.clone(), t2.clone(), images.clone()).expect("images in range"));
            return;
        }
        for &c in &candidates[i] {
            let ok = (0..i).all(|k| (!t1.leq(k, i) || t2.leq(images[k], c)) && (!t1.leq(i, k) || t2.leq(c, images[k])));
            if ok {
                images.push(c);
                go(t1, t2, d, candidates, images, out);
                images.pop();
            }
        }
    }
    go(t1, t2, t1, &candidates, &mut images, &mut out);
    out
}

/// A pushout square of distributive lattices with apex `Up(pullback)`.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub apex: Arc<FiniteHeytingAlgebra>,
    pub left: HeytingHom,
    pub right: HeytingHom,
    pub pullback: Pullback,
}

/// Pushout of `c1: H → A1` and `c2: H → A2` among distributive lattices.
pub fn dl_pushout(c1: &HeytingHom, c2: &HeytingHom) -> Result<Pushout, LimitError> {
    if !Arc::ptr_eq(c1.domain(), c2.domain()) && **c1.domain() != **c2.domain() {
        return Err(LimitError::DomainMismatch);
    }
    let d1 = dual_of_lattice_homomorphism(c1)?;
    let d2 = dual_of_lattice_homomorphism(c2)?;
    let pullback = poset_pullback(&d1, &d2)?;
    let apex = Arc::new(FiniteHeytingAlgebra::upset_algebra(pullback.apex.clone())?);
    let leg = |c: &HeytingHom, p: &PosetMap| -> Result<HeytingHom, LimitError> {
        let rep = counit_iso(c.codomain().clone())?;
        let pre = dual_of_monotone_map(p, rep.codomain().clone(), apex.clone())?;
        Ok(pre.after(&rep)?)
    };
    let left = leg(c1, &pullback.left)?;
    let right = leg(c2, &pullback.right)?;
    Ok(Pushout { apex, left, right, pullback })
}

/// The coproduct of two étale H-algebras with its coprojections.
#[derive(Debug, Clone)]
pub struct EtaleCoproduct {
    pub algebra: HAlgebra,
    pub left: HeytingHom,
    pub right: HeytingHom,
    pub product: BundleProduct,
}

/// Dual to the product of the corresponding strict bundles over `X_H`.
pub fn etale_coproduct(c1: &HAlgebra, c2: &HAlgebra) -> Result<EtaleCoproduct, LimitError> {
    if !Arc::ptr_eq(c1.base(), c2.base()) && **c1.base() != **c2.base() {
        return Err(LimitError::DomainMismatch);
    }
    if !is_etale(c1) {
        return Err(LimitError::NotEtale("left"));
    }
    if !is_etale(c2) {
        return Err(LimitError::NotEtale("right"));
    }
    let b1 = Bundle::new(dual_of_homomorphism(c1.structure())?)?;
    let b2 = Bundle::new(dual_of_homomorphism(c2.structure())?)?;
    let product = bundle_product_with_legs(&b1, &b2)?;
    let total = Arc::new(FiniteHeytingAlgebra::upset_algebra(product.bundle.total().clone())?);
    let through = |a: &Arc<FiniteHeytingAlgebra>, p: &PosetMap| -> Result<HeytingHom, LimitError> {
        let rep = counit_iso(a.clone())?;
        let pre = dual_of_pmorphism_with(p, rep.codomain().clone(), total.clone())?;
        Ok(pre.after(&rep)?)
    };
    let structure = through(c1.base(), product.bundle.projection())?;
    let left = through(c1.carrier(), &product.pullback.left)?;
    let right = through(c2.carrier(), &product.pullback.right)?;
    Ok(EtaleCoproduct { algebra: HAlgebra::new(structure)?, left, right, product })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etale::etale_axiom_holds;
    use crate::heyting::{find_isomorphism, is_isomorphic};
    use crate::poset::make_poset;
    use crate::presheaf::{fiber_presheaf, find_iso_over, grothendieck};

    fn pt() -> Arc<FinitePoset> {
        Arc::new(FinitePoset::antichain(&["pt"]).unwrap())
    }

    fn c2() -> Arc<FinitePoset> {
        Arc::new(make_poset(&["a", "b"], &[("a", "b")]).unwrap())
    }

    fn a2() -> Arc<FinitePoset> {
        Arc::new(FinitePoset::antichain(&["l", "r"]).unwrap())
    }

    fn up(p: Arc<FinitePoset>) -> Arc<FiniteHeytingAlgebra> {
        Arc::new(FiniteHeytingAlgebra::upset_algebra(p).unwrap())
    }

    #[test]
    fn terminal_examples() {
        let t = terminal_bundle(pt());
        assert_eq!(t.total().len(), 1);
        let e = terminal_bundle(Arc::new(FinitePoset::empty()));
        assert!(e.total().is_empty());
        let lambda = Arc::new(make_poset(&["x1", "x2", "y"], &[("x1", "y"), ("x2", "y")]).unwrap());
        let f = Bundle::new(PosetMap::new(lambda, c2(), vec![0, 0, 1]).unwrap()).unwrap();
        let maps = maps_over(&f, &terminal_bundle(c2()));
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].images(), f.projection().images());
    }

    #[test]
    fn pullback_examples() {
        let p = c2();
        let id = PosetMap::identity(p.clone());
        let d = poset_pullback(&id, &id).unwrap();
        assert!(d.apex.same_order(&p));

        let k = PosetMap::constant(a2(), pt(), 0).unwrap();
        let sq = poset_pullback(&k, &k).unwrap();
        assert_eq!(sq.apex.len(), 4);
        assert!(sq.apex.covers().is_empty());

        let empty = PosetMap::new(Arc::new(FinitePoset::empty()), pt(), vec![]).unwrap();
        assert!(poset_pullback(&empty, &k).unwrap().apex.is_empty());

        let other = PosetMap::identity(pt());
        assert!(matches!(poset_pullback(&id, &other), Err(LimitError::CodomainMismatch)));
    }

    #[test]
    fn bundle_products() {
        let two = Bundle::new(PosetMap::constant(a2(), pt(), 0).unwrap()).unwrap();
        let sq = bundle_product(&two, &two).unwrap();
        assert_eq!(sq.fiber(0).len(), 4);
        assert!(sq.projection().is_strict_p_morphism());

        let back = bundle_product(&two, &terminal_bundle(pt())).unwrap();
        assert!(find_iso_over(&back, &two).is_some());

        let lambda = Arc::new(make_poset(&["x1", "x2", "y"], &[("x1", "y"), ("x2", "y")]).unwrap());
        let f = Bundle::new(PosetMap::new(lambda, c2(), vec![0, 0, 1]).unwrap()).unwrap();
        let ff = bundle_product(&f, &f).unwrap();
        assert_eq!((ff.fiber(0).len(), ff.fiber(1).len()), (4, 1));
        let pointwise = fiber_presheaf(&f).unwrap().product(&fiber_presheaf(&f).unwrap()).unwrap();
        assert!(find_iso_over(&ff, &grothendieck(&pointwise).unwrap()).is_some());

        assert!(matches!(bundle_product(&f, &two), Err(LimitError::BaseMismatch)));
    }

    #[test]
    fn pushout_of_identities_is_the_algebra() {
        let h = up(c2());
        let id = HeytingHom::identity(h.clone());
        let p = dl_pushout(&id, &id).unwrap();
        assert!(is_isomorphic(&p.apex, &h));
    }

    #[test]
    fn pushout_with_an_identity_leg_is_the_other_algebra() {
        let h = up(pt());
        let four = up(a2());
        let c = HeytingHom::new(h.clone(), four.clone(), vec![0, 3]).unwrap();
        let p = dl_pushout(&c, &HeytingHom::identity(h)).unwrap();
        assert_eq!(p.apex.len(), 4);
        let fixed: Vec<(usize, usize)> = four.elements().map(|a| (p.left.apply(a), a)).collect();
        assert!(find_isomorphism(&p.apex, &four, &fixed).is_some());
    }

    #[test]
    fn two_boolean_extensions_give_sixteen() {
        let h = up(pt());
        let four = up(a2());
        let c = HeytingHom::new(h.clone(), four.clone(), vec![0, 3]).unwrap();
        let p = dl_pushout(&c, &c).unwrap();
        assert_eq!(p.apex.len(), 16);
        assert!(p.pullback.apex.covers().is_empty());
        assert!(p.left.is_lattice_homomorphism() && p.right.is_lattice_homomorphism());
        assert_eq!(p.left.after(&c).unwrap().images(), p.right.after(&c).unwrap().images());

        let e = HAlgebra::new(c).unwrap();
        let co = etale_coproduct(&e, &e).unwrap();
        assert_eq!(co.algebra.carrier().len(), 16);
        assert!(etale_axiom_holds(&co.algebra));
        let fixed: Vec<(usize, usize)> = four
            .elements()
            .flat_map(|a| [(co.left.apply(a), p.left.apply(a)), (co.right.apply(a), p.right.apply(a))])
            .collect();
        assert!(find_isomorphism(co.algebra.carrier(), &p.apex, &fixed).is_some());
    }

    #[test]
    fn coproduct_with_identity_is_the_algebra() {
        let x = c2();
        let h = up(x.clone());
        let lambda = Arc::new(make_poset(&["x1", "x2", "y"], &[("x1", "y"), ("x2", "y")]).unwrap());
        let f = PosetMap::new(lambda, x, vec![0, 0, 1]).unwrap();
        let c = HAlgebra::from_pmorphism_with(&f, h.clone(), up(f.domain().clone())).unwrap();
        let co = etale_coproduct(&c, &HAlgebra::identity(h)).unwrap();
        assert!(is_isomorphic(co.algebra.carrier(), c.carrier()));
        assert!(co.left.is_isomorphism());
        assert_eq!(co.left.after(c.structure()).unwrap().images(), co.algebra.structure().images());
    }

    #[test]
    fn non_etale_input_is_rejected() {
        let k = PosetMap::constant(c2(), pt(), 0).unwrap();
        let bad = HAlgebra::from_pmorphism(&k).unwrap();
        let good = HAlgebra::identity(bad.base().clone());
        assert!(matches!(etale_coproduct(&bad, &good), Err(LimitError::NotEtale("left"))));
    }
}
