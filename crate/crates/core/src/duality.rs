//! Finite Esakia duality.
//!
//! A finite poset `X` goes to its upset algebra `Up(X)`; a finite Heyting
//! algebra `A` goes to the poset of its prime filters ordered by inclusion.
//! p-morphisms dualize to homomorphisms by taking preimages of upsets, and
//! homomorphisms dualize back by taking preimages of prime filters.

use std::sync::Arc;

use thiserror::Error;

use crate::heyting::{FiniteHeytingAlgebra, HeytingError, HeytingHom};
use crate::poset::{FinitePoset, PosetError, PosetMap, Subset, MAX_ELEMENTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualityError {
    #[error("not a p-morphism: {0}")]
    NotAPMorphism(String),
    #[error("not a Heyting homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("not a bounded lattice homomorphism: {0}")]
    NotALatticeHomomorphism(String),
    #[error("algebra is not distributive: {0}")]
    NotDistributive(String),
    #[error("comparison map is not an isomorphism: {0}")]
    NotAnIsomorphism(String),
    #[error("{0} prime filters exceed the poset limit of {MAX_ELEMENTS}")]
    TooManyPrimeFilters(usize),
    #[error("algebra is not the upset algebra of the expected poset")]
    AlgebraMismatch,
    #[error(transparent)]
    Heyting(#[from] HeytingError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A prime filter of a finite lattice. Every filter of a finite lattice is
/// principal, so it is stored with its least element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFilter {
    generator: usize,
    members: Vec<usize>,
}

impl PrimeFilter {
    pub fn generator(&self) -> usize {
        self.generator
    }

    /// Members in ascending index order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.binary_search(&a).is_ok()
    }
}

/// The prime-filter poset of an algebra together with the filters themselves.
#[derive(Debug)]
pub struct DualSpace {
    poset: Arc<FinitePoset>,
    filters: Vec<PrimeFilter>,
    by_generator: Vec<Option<usize>>,
}

impl DualSpace {
    pub fn poset(&self) -> &Arc<FinitePoset> {
        &self.poset
    }

    pub fn filters(&self) -> &[PrimeFilter] {
        &self.filters
    }

    /// Point whose prime filter is `↑g`, if that filter is prime.
    pub fn point_generated_by(&self, g: usize) -> Option<usize> {
        self.by_generator.get(g).copied().flatten()
    }
}

/// Prime filters of `a`, ordered by the index of their least element.
///
/// Candidates are the principal filters `↑g` with `g ≠ ⊥`. `↑g` is prime iff
/// its complement is closed under joins, i.e. iff the join of everything
/// outside `↑g` stays outside.
pub fn prime_filters(a: &FiniteHeytingAlgebra) -> Vec<PrimeFilter> {
    let mut out = Vec::new();
    for g in a.elements() {
        if g == a.bottom() {
            continue;
        }
        let outside = a.join_all(a.elements().filter(|&x| !a.leq(g, x)));
        if a.leq(g, outside) {
            continue;
        }
        let members = a.elements().filter(|&x| a.leq(g, x)).collect();
        out.push(PrimeFilter { generator: g, members });
    }
    out
}

/// The dual space of `a`, computed once per algebra and cached on it.
pub fn dual_space(a: &FiniteHeytingAlgebra) -> Result<Arc<DualSpace>, DualityError> {
    if let Some(d) = a.dual_cache().get() {
        return Ok(d.clone());
    }
    let filters = prime_filters(a);
    if filters.len() > MAX_ELEMENTS {
        return Err(DualityError::TooManyPrimeFilters(filters.len()));
    }
    let labels = filters.iter().map(|f| format!("up({})", a.label(f.generator))).collect();
    // F ≤ G iff F ⊆ G iff gen(G) ≤ gen(F).
    let poset = FinitePoset::from_relation(labels, |i, j| a.leq(filters[j].generator, filters[i].generator))?;
    let mut by_generator = vec![None; a.len()];
    for (i, f) in filters.iter().enumerate() {
        by_generator[f.generator] = Some(i);
    }
    let space = Arc::new(DualSpace { poset: Arc::new(poset), filters, by_generator });
    Ok(a.dual_cache().get_or_init(|| space).clone())
}

/// Prime filters of `a` ordered by inclusion. A degenerate algebra yields the empty poset.
pub fn dual_poset(a: &FiniteHeytingAlgebra) -> Result<FinitePoset, DualityError> {
    Ok((*dual_space(a)?.poset).clone())
}

/// `f^*` on upsets, `Up(codomain) → Up(domain)`.
pub fn dual_of_pmorphism(f: &PosetMap) -> Result<HeytingHom, DualityError> {
    let up_cod = Arc::new(FiniteHeytingAlgebra::upset_algebra(f.codomain().clone())?);
    let up_dom = Arc::new(FiniteHeytingAlgebra::upset_algebra(f.domain().clone())?);
    dual_of_pmorphism_with(f, up_cod, up_dom)
}

/// As [`dual_of_pmorphism`], reusing already built upset algebras.
pub fn dual_of_pmorphism_with(
    f: &PosetMap,
    up_cod: Arc<FiniteHeytingAlgebra>,
    up_dom: Arc<FiniteHeytingAlgebra>,
) -> Result<HeytingHom, DualityError> {
    if let Some((x1, x2)) = f.monotonicity_violation() {
        return Err(DualityError::NotAPMorphism(format!(
            "{} <= {} but images are not ordered",
            f.domain().label(x1),
            f.domain().label(x2)
        )));
    }
    if let Some((x, y)) = f.back_condition_violation() {
        return Err(DualityError::NotAPMorphism(format!(
            "no element above {} maps to {}",
            f.domain().label(x),
            f.codomain().label(y)
        )));
    }
    let images = inverse_image_table(f, &up_cod, &up_dom)?;
    Ok(HeytingHom::new(up_cod, up_dom, images)?)
}

/// `f^*` for a merely monotone map; a bounded lattice homomorphism.
pub fn dual_of_monotone_map(
    f: &PosetMap,
    up_cod: Arc<FiniteHeytingAlgebra>,
    up_dom: Arc<FiniteHeytingAlgebra>,
) -> Result<HeytingHom, DualityError> {
    if !f.is_monotone() {
        return Err(DualityError::NotAPMorphism("map is not monotone".into()));
    }
    let images = inverse_image_table(f, &up_cod, &up_dom)?;
    Ok(HeytingHom::new(up_cod, up_dom, images)?)
}

fn inverse_image_table(
    f: &PosetMap,
    up_cod: &FiniteHeytingAlgebra,
    up_dom: &FiniteHeytingAlgebra,
) -> Result<Vec<usize>, DualityError> {
    let (cod, dom) = match (up_cod.upsets(), up_dom.upsets()) {
        (Some(c), Some(d)) => (c, d),
        _ => return Err(DualityError::AlgebraMismatch),
    };
    if !cod.points().same_order(f.codomain()) || !dom.points().same_order(f.domain()) {
        return Err(DualityError::AlgebraMismatch);
    }
    cod.masks().iter().map(|&v| dom.index_of(f.inverse_image(v)).ok_or(DualityError::AlgebraMismatch)).collect()
}

/// `F ↦ h⁻¹(F)`, from the dual of `h`'s codomain to the dual of its domain.
pub fn dual_of_homomorphism(h: &HeytingHom) -> Result<PosetMap, DualityError> {
    if let Some(why) = h.homomorphism_violation() {
        return Err(DualityError::NotAHomomorphism(why));
    }
    filter_preimage_map(h)
}

/// The monotone dual of a bounded lattice homomorphism.
pub fn dual_of_lattice_homomorphism(h: &HeytingHom) -> Result<PosetMap, DualityError> {
    if let Some(why) = h.lattice_homomorphism_violation() {
        return Err(DualityError::NotALatticeHomomorphism(why));
    }
    filter_preimage_map(h)
}

fn filter_preimage_map(h: &HeytingHom) -> Result<PosetMap, DualityError> {
    let (dom, cod) = (h.domain(), h.codomain());
    let source = dual_space(cod)?;
    let target = dual_space(dom)?;
    let mut images = Vec::with_capacity(source.filters.len());
    for f in &source.filters {
        let preimage: Vec<usize> = dom.elements().filter(|&a| f.contains(h.apply(a))).collect();
        let g = dom.meet_all(preimage.iter().copied());
        let point = target
            .point_generated_by(g)
            .filter(|&p| target.filters[p].members == preimage)
            .ok_or_else(|| DualityError::NotALatticeHomomorphism("preimage of a prime filter is not prime".into()))?;
        images.push(point);
    }
    Ok(PosetMap::new(source.poset.clone(), target.poset.clone(), images)?)
}

/// `x ↦ {U ∈ Up(X) | x ∈ U}`, an order-isomorphism `X → dual_poset(Up(X))`.
pub fn unit_iso(x: Arc<FinitePoset>) -> Result<PosetMap, DualityError> {
    let alg = FiniteHeytingAlgebra::upset_algebra(x.clone())?;
    unit_iso_with(x, &alg)
}

pub fn unit_iso_with(x: Arc<FinitePoset>, up_x: &FiniteHeytingAlgebra) -> Result<PosetMap, DualityError> {
    let carrier = up_x.upsets().ok_or(DualityError::AlgebraMismatch)?;
    if !carrier.points().same_order(&x) {
        return Err(DualityError::AlgebraMismatch);
    }
    let space = dual_space(up_x)?;
    let mut images = Vec::with_capacity(x.len());
    for p in 0..x.len() {
        let members: Vec<usize> = up_x.elements().filter(|&u| carrier.mask(u).contains(p)).collect();
        let g = up_x.meet_all(members.iter().copied());
        let point = space.point_generated_by(g).filter(|&i| space.filters[i].members == members).ok_or_else(|| {
            DualityError::NotAnIsomorphism(format!("upsets containing {} do not form a prime filter", x.label(p)))
        })?;
        images.push(point);
    }
    let unit = PosetMap::new(x, space.poset.clone(), images)?;
    if !unit.is_order_isomorphism() {
        return Err(DualityError::NotAnIsomorphism("unit is not an order-isomorphism".into()));
    }
    Ok(unit)
}

/// `a ↦ {F prime | a ∈ F}`, a Heyting isomorphism `A → Up(dual_poset(A))`.
pub fn counit_iso(a: Arc<FiniteHeytingAlgebra>) -> Result<HeytingHom, DualityError> {
    let space = dual_space(&a)?;
    let up = Arc::new(FiniteHeytingAlgebra::upset_algebra(space.poset.clone())?);
    let carrier = up.upsets().expect("upset algebra");
    let images = a
        .elements()
        .map(|x| {
            let s: Subset = (0..space.filters.len()).filter(|&i| space.filters[i].contains(x)).collect();
            carrier.index_of(s).ok_or_else(|| {
                DualityError::NotDistributive(format!("filters containing {} do not form an upset", a.label(x)))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let counit = HeytingHom::new(a, up, images)?;
    if !counit.is_bijective() {
        return Err(DualityError::NotDistributive("counit is not a bijection".into()));
    }
    if let Some(why) = counit.homomorphism_violation() {
        return Err(DualityError::NotDistributive(why));
    }
    Ok(counit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::make_poset;

    fn arc(p: FinitePoset) -> Arc<FinitePoset> {
        Arc::new(p)
    }

    fn up(p: &Arc<FinitePoset>) -> Arc<FiniteHeytingAlgebra> {
        Arc::new(FiniteHeytingAlgebra::upset_algebra(p.clone()).unwrap())
    }

    fn pt() -> Arc<FinitePoset> {
        arc(FinitePoset::antichain(&["pt"]).unwrap())
    }

    fn c2() -> Arc<FinitePoset> {
        arc(make_poset(&["a", "b"], &[("a", "b")]).unwrap())
    }

    fn a2() -> Arc<FinitePoset> {
        arc(FinitePoset::antichain(&["a", "b"]).unwrap())
    }

    /// Prime filters straight from the definition: nonempty upsets of the
    /// lattice order, closed under meet, missing bottom, and prime.
    fn brute_force_prime_filters(a: &FiniteHeytingAlgebra) -> Vec<Vec<usize>> {
        let order = a.order_poset().unwrap();
        let mut out: Vec<Vec<usize>> = order
            .all_upsets()
            .into_iter()
            .filter(|s| !s.is_empty() && !s.contains(a.bottom()))
            .filter(|s| s.iter().all(|x| s.iter().all(|y| s.contains(a.meet(x, y)))))
            .filter(|s| {
                a.elements().all(|x| a.elements().all(|y| !s.contains(a.join(x, y)) || s.contains(x) || s.contains(y)))
            })
            .map(|s| s.iter().collect())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn prime_filters_match_definition() {
        let posets = [
            pt(),
            c2(),
            a2(),
            arc(make_poset(&["r", "s", "t"], &[("r", "s"), ("r", "t")]).unwrap()),
            arc(make_poset(&["a", "b", "c", "d"], &[("a", "c"), ("b", "c"), ("b", "d")]).unwrap()),
        ];
        for p in posets {
            let a = up(&p);
            let mut fast: Vec<Vec<usize>> = prime_filters(&a).into_iter().map(|f| f.members).collect();
            fast.sort();
            assert_eq!(fast, brute_force_prime_filters(&a));
        }
    }

    #[test]
    fn prime_filters_correspond_to_join_irreducibles() {
        let p = arc(make_poset(&["a", "b", "c", "d"], &[("a", "c"), ("b", "c"), ("b", "d")]).unwrap());
        let a = up(&p);
        let gens: Vec<usize> = prime_filters(&a).iter().map(|f| f.generator).collect();
        assert_eq!(gens, a.join_irreducibles());
    }

    #[test]
    fn dual_posets_of_small_algebras() {
        assert_eq!(dual_poset(&up(&pt())).unwrap().len(), 1);

        let chain3 = FiniteHeytingAlgebra::from_lattice_order(&FinitePoset::chain(&["0", "m", "1"]).unwrap()).unwrap();
        let d = dual_poset(&chain3).unwrap();
        assert_eq!(d.labels(), &["up(m)", "up(1)"]);
        // {1} ⊂ {m,1}
        assert!(d.leq(1, 0) && !d.leq(0, 1));

        let d = dual_poset(&up(&a2())).unwrap();
        assert_eq!(d.len(), 2);
        assert!(!d.leq(0, 1) && !d.leq(1, 0));

        assert!(dual_poset(&up(&arc(FinitePoset::empty()))).unwrap().is_empty());
    }

    #[test]
    fn pmorphism_duals() {
        let p = c2();
        let id = dual_of_pmorphism(&PosetMap::identity(p.clone())).unwrap();
        assert_eq!(id.images(), &[0, 1, 2]);

        let k = PosetMap::constant(p.clone(), pt(), 0).unwrap();
        let dk = dual_of_pmorphism(&k).unwrap();
        let shown: Vec<(&str, &str)> =
            (0..2).map(|i| (dk.domain().label(i), dk.codomain().label(dk.apply(i)))).collect();
        assert_eq!(shown, vec![("{}", "{}"), ("{pt}", "{a,b}")]);
        assert!(dk.is_homomorphism());

        // ↑b ↪ C2
        let sub = arc(FinitePoset::antichain(&["b"]).unwrap());
        let incl = PosetMap::new(sub, p.clone(), vec![1]).unwrap();
        let di = dual_of_pmorphism(&incl).unwrap();
        let shown: Vec<(&str, &str)> =
            (0..3).map(|i| (di.domain().label(i), di.codomain().label(di.apply(i)))).collect();
        assert_eq!(shown, vec![("{}", "{}"), ("{b}", "{b}"), ("{a,b}", "{b}")]);
        assert!(di.is_homomorphism());

        let low = PosetMap::new(p.clone(), p, vec![0, 0]).unwrap();
        assert!(matches!(dual_of_pmorphism(&low), Err(DualityError::NotAPMorphism(_))));
    }

    #[test]
    fn monotone_non_pmorphism_dual_is_only_a_lattice_hom() {
        let p = c2();
        let low = PosetMap::new(p.clone(), p.clone(), vec![0, 0]).unwrap();
        let h = dual_of_monotone_map(&low, up(&p), up(&p)).unwrap();
        assert!(h.is_lattice_homomorphism());
        assert!(!h.is_homomorphism());
    }

    #[test]
    fn homomorphism_duals() {
        let two = up(&pt());
        let four = up(&a2());
        let id = dual_of_homomorphism(&HeytingHom::identity(four.clone())).unwrap();
        assert_eq!(id.images(), &[0, 1]);

        let h = HeytingHom::new(two, four.clone(), vec![0, 3]).unwrap();
        let d = dual_of_homomorphism(&h).unwrap();
        assert_eq!(d.domain().len(), 2);
        assert_eq!(d.codomain().len(), 1);
        assert_eq!(d.images(), &[0, 0]);
        assert!(d.is_p_morphism());

        let bad = HeytingHom::new(four.clone(), four, vec![3; 4]).unwrap();
        assert!(matches!(dual_of_homomorphism(&bad), Err(DualityError::NotAHomomorphism(_))));
    }

    #[test]
    fn double_dual_recovers_pmorphism() {
        // f: V → C2, r ↦ a, s,t ↦ b
        let v = arc(make_poset(&["r", "s", "t"], &[("r", "s"), ("r", "t")]).unwrap());
        let c = c2();
        let f = PosetMap::new(v.clone(), c.clone(), vec![0, 1, 1]).unwrap();
        assert!(f.is_p_morphism());
        let ff = dual_of_homomorphism(&dual_of_pmorphism(&f).unwrap()).unwrap();
        let ux = unit_iso(v).unwrap();
        let uy = unit_iso(c).unwrap();
        // ff ∘ unit_V = unit_C2 ∘ f
        let lhs: Vec<usize> = (0..3).map(|x| ff.apply(ux.apply(x))).collect();
        let rhs: Vec<usize> = (0..3).map(|x| uy.apply(f.apply(x))).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn unit_and_counit_examples() {
        let u = unit_iso(pt()).unwrap();
        assert!(u.is_order_isomorphism());
        let u = unit_iso(c2()).unwrap();
        assert!(u.is_order_isomorphism());
        assert_eq!(u.codomain().len(), 2);
        let c = counit_iso(up(&a2())).unwrap();
        assert!(c.is_isomorphism());
        let chain3 =
            Arc::new(FiniteHeytingAlgebra::from_lattice_order(&FinitePoset::chain(&["0", "m", "1"]).unwrap()).unwrap());
        assert!(counit_iso(chain3).unwrap().is_isomorphism());
    }

    #[test]
    fn counit_rejects_non_distributive_tables() {
        // M3 tables, with an arbitrary implication column: the lattice has
        // only the trivial prime filter structure, so the counit collapses.
        let m3 = make_poset(
            &["0", "x", "y", "z", "1"],
            &[("0", "x"), ("0", "y"), ("0", "z"), ("x", "1"), ("y", "1"), ("z", "1")],
        )
        .unwrap();
        let n = 5;
        let glb = |a: usize, b: usize| (0..n).find(|&g| m3.down(g) == m3.down(a).intersection(m3.down(b))).unwrap();
        let lub = |a: usize, b: usize| (0..n).find(|&g| m3.up(g) == m3.up(a).intersection(m3.up(b))).unwrap();
        let mut meet = vec![0u16; 25];
        let mut join = vec![0u16; 25];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = glb(a, b) as u16;
                join[a * n + b] = lub(a, b) as u16;
            }
        }
        let alg = FiniteHeytingAlgebra::from_tables(m3.labels().to_vec(), meet, join, vec![4; 25], 0, 4).unwrap();
        assert!(matches!(counit_iso(Arc::new(alg)), Err(DualityError::NotDistributive(_))));
    }
}
