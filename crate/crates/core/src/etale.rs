//! H-algebras and the étale axiom.
//!
//! An H-algebra is a Heyting homomorphism `c: H → A`; the constants of the
//! expanded signature are the images `c(h)`. For finite `H` and `A` the
//! algebra is étale exactly when
//!
//! ```text
//!     ⋁_{h ∈ H} (x ⇔ c(h)) = 1     for every x ∈ A
//! ```
//!
//! and dually exactly when the corresponding map of posets is a strict
//! p-morphism.

use std::sync::Arc;

use thiserror::Error;

use crate::duality::{dual_of_pmorphism, dual_of_pmorphism_with, DualityError};
use crate::heyting::{FiniteHeytingAlgebra, HeytingHom};
use crate::poset::{PosetMap, Subset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EtaleError {
    #[error("structure map is not a Heyting homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error(transparent)]
    Duality(#[from] DualityError),
}

/// A finite Heyting algebra `A` together with a homomorphism `H → A`.
#[derive(Debug, Clone, PartialEq)]
pub struct HAlgebra {
    structure: HeytingHom,
}

impl HAlgebra {
    pub fn new(structure: HeytingHom) -> Result<Self, EtaleError> {
        if let Some(why) = structure.homomorphism_violation() {
            return Err(EtaleError::NotAHomomorphism(why));
        }
        Ok(HAlgebra { structure })
    }

    /// `1_H`, the generator of the étale variety.
    pub fn identity(h: Arc<FiniteHeytingAlgebra>) -> Self {
        HAlgebra { structure: HeytingHom::identity(h) }
    }

    /// The H-algebra `f^*: Up(X) → Up(X')` of a p-morphism `f: X' → X`.
    pub fn from_pmorphism(f: &PosetMap) -> Result<Self, EtaleError> {
        Ok(HAlgebra { structure: dual_of_pmorphism(f)? })
    }

    pub fn from_pmorphism_with(
        f: &PosetMap,
        up_cod: Arc<FiniteHeytingAlgebra>,
        up_dom: Arc<FiniteHeytingAlgebra>,
    ) -> Result<Self, EtaleError> {
        Ok(HAlgebra { structure: dual_of_pmorphism_with(f, up_cod, up_dom)? })
    }

    pub fn base(&self) -> &Arc<FiniteHeytingAlgebra> {
        self.structure.domain()
    }

    pub fn carrier(&self) -> &Arc<FiniteHeytingAlgebra> {
        self.structure.codomain()
    }

    pub fn structure(&self) -> &HeytingHom {
        &self.structure
    }

    /// The constant `c_h`.
    pub fn constant(&self, h: usize) -> usize {
        self.structure.apply(h)
    }
}

/// `⋁_{h∈H} (a ⇔ c(h))` in `A`.
pub fn etale_axiom_value(c: &HAlgebra, a: usize) -> usize {
    let carrier = c.carrier();
    let top = carrier.top();
    let mut acc = carrier.bottom();
    for h in c.base().elements() {
        acc = carrier.join(acc, carrier.biconditional(a, c.constant(h)));
        if acc == top {
            break;
        }
    }
    acc
}

/// Some `a` at which the axiom evaluates below top.
pub fn failure_witness(c: &HAlgebra) -> Option<usize> {
    let top = c.carrier().top();
    c.carrier().elements().find(|&a| etale_axiom_value(c, a) != top)
}

pub fn etale_axiom_holds(c: &HAlgebra) -> bool {
    failure_witness(c).is_none()
}

/// Membership in the étale variety; for finite algebras this is the axiom check.
pub fn is_etale(c: &HAlgebra) -> bool {
    etale_axiom_holds(c)
}

/// Some `h` with `y ∧ a = y ∧ c(h)`.
pub fn local_agreement(c: &HAlgebra, a: usize, y: usize) -> Option<usize> {
    let carrier = c.carrier();
    let target = carrier.meet(y, a);
    c.base().elements().find(|&h| carrier.meet(y, c.constant(h)) == target)
}

/// Whether `cover` joins to top and every member agrees with `a` locally on
/// some constant. When it does, the axiom holds at `a`.
pub fn certified_by_cover(c: &HAlgebra, a: usize, cover: &[usize]) -> bool {
    let carrier = c.carrier();
    carrier.join_all(cover.iter().copied()) == carrier.top()
        && cover.iter().all(|&y| local_agreement(c, a, y).is_some())
}

/// For a p-morphism `f: X' → X`, a point `y ∈ X'` and an upset `U` of `X'`:
/// the upset `W = f_!(↑y ∩ U)` of `X`. When `f` is strict it satisfies
/// `↑y ∩ U = ↑y ∩ f^*(W)`.
pub fn local_witness(f: &PosetMap, y: usize, u: Subset) -> Subset {
    f.direct_image(f.domain().up(y).intersection(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{make_poset, FinitePoset};

    fn c2() -> Arc<FinitePoset> {
        Arc::new(make_poset(&["a", "b"], &[("a", "b")]).unwrap())
    }

    fn pt() -> Arc<FinitePoset> {
        Arc::new(FinitePoset::antichain(&["pt"]).unwrap())
    }

    fn a2() -> Arc<FinitePoset> {
        Arc::new(FinitePoset::antichain(&["a", "b"]).unwrap())
    }

    #[test]
    fn identity_halgebra_validates_axiom() {
        for p in [pt(), c2(), a2(), Arc::new(make_poset(&["r", "s", "t"], &[("r", "s"), ("r", "t")]).unwrap())] {
            let h = Arc::new(FiniteHeytingAlgebra::upset_algebra(p).unwrap());
            let c = HAlgebra::identity(h.clone());
            for a in h.elements() {
                assert_eq!(etale_axiom_value(&c, a), h.top());
            }
            assert!(etale_axiom_holds(&c));
            assert!(is_etale(&c));
            assert_eq!(failure_witness(&c), None);
        }
    }

    #[test]
    fn constant_c2_to_point_fails_at_b() {
        let k = PosetMap::constant(c2(), pt(), 0).unwrap();
        let c = HAlgebra::from_pmorphism(&k).unwrap();
        let b = c.carrier().index_of("{b}").unwrap();
        assert_eq!(c.carrier().label(etale_axiom_value(&c, b)), "{b}");
        assert!(!etale_axiom_holds(&c));
        assert!(!is_etale(&c));
        assert_eq!(failure_witness(&c), Some(b));
    }

    #[test]
    fn constant_a2_to_point_is_etale() {
        let k = PosetMap::constant(a2(), pt(), 0).unwrap();
        let c = HAlgebra::from_pmorphism(&k).unwrap();
        assert_eq!(c.carrier().len(), 4);
        assert!(etale_axiom_holds(&c));
    }

    #[test]
    fn constants_satisfy_axiom() {
        let k = PosetMap::constant(c2(), pt(), 0).unwrap();
        let c = HAlgebra::from_pmorphism(&k).unwrap();
        for h in c.base().elements() {
            assert_eq!(etale_axiom_value(&c, c.constant(h)), c.carrier().top());
        }
    }

    #[test]
    fn degenerate_carrier_has_no_witness() {
        let empty = Arc::new(FinitePoset::empty());
        let f = PosetMap::new(empty.clone(), empty, vec![]).unwrap();
        let c = HAlgebra::from_pmorphism(&f).unwrap();
        assert!(c.carrier().is_degenerate());
        assert_eq!(failure_witness(&c), None);
    }

    #[test]
    fn non_homomorphism_structure_is_rejected() {
        let h = Arc::new(FiniteHeytingAlgebra::upset_algebra(c2()).unwrap());
        let bad = HeytingHom::new(h.clone(), h, vec![2, 2, 2]).unwrap();
        assert!(matches!(HAlgebra::new(bad), Err(EtaleError::NotAHomomorphism(_))));
    }

    #[test]
    fn strict_witnesses_agree_locally() {
        let f = PosetMap::constant(a2(), pt(), 0).unwrap();
        let up_dom = f.domain().all_upsets();
        for &u in &up_dom {
            for y in 0..2 {
                let w = local_witness(&f, y, u);
                let upy = f.domain().up(y);
                assert_eq!(upy.intersection(u), upy.intersection(f.inverse_image(w)));
            }
        }
    }

    #[test]
    fn principal_cover_certificate_implies_axiom() {
        let k = PosetMap::constant(a2(), pt(), 0).unwrap();
        let c = HAlgebra::from_pmorphism(&k).unwrap();
        let carrier = c.carrier().clone();
        let ups = carrier.upsets().unwrap();
        // ↑a, ↑b join to the top of Up(A2).
        let cover: Vec<usize> = (0..2).map(|x| ups.index_of(ups.points().up(x)).unwrap()).collect();
        for a in carrier.elements() {
            assert!(certified_by_cover(&c, a, &cover));
            assert_eq!(etale_axiom_value(&c, a), carrier.top());
        }
    }
}
