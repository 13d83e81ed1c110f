//! Finite-set-valued presheaves on finite posets and strict bundles.
//!
//! A presheaf here is a covariant functor `F: X → FinSet`: a finite fiber
//! `F(x)` for each point and a restriction `F(x) → F(y)` for each `x ≤ y`.
//! The Grothendieck construction turns `F` into a strict p-morphism
//! `∫F → X`, and taking fibers turns a strict p-morphism back into a
//! presheaf. Subfunctors of `F` are exactly the upsets of `∫F`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::heyting::{FiniteHeytingAlgebra, HeytingError, HeytingHom};
use crate::poset::{FinitePoset, PosetError, PosetMap, Subset, MAX_ELEMENTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),
    #[error("projection is not a strict p-morphism: {0}")]
    NotStrict(String),
    #[error("presheaves live over different bases")]
    BaseMismatch,
    #[error("fiber element {1} is not in the fiber over {0}")]
    UnknownFiberElement(String, usize),
    #[error("presheaf morphism is not natural: {0}")]
    NotNatural(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Heyting(#[from] HeytingError),
}

#[derive(Clone, PartialEq)]
pub struct Presheaf {
    base: Arc<FinitePoset>,
    fibers: Vec<Vec<String>>,
    // Indexed by x * n + y; `Some` exactly when x ≤ y.
    restrictions: Vec<Option<Vec<usize>>>,
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<usize> = self.fibers.iter().map(Vec::len).collect();
        f.debug_struct("Presheaf")
            .field("base", &self.base.labels())
            .field("fiber_sizes", &sizes)
            .field("cover_restrictions", &self.cover_restrictions())
            .finish()
    }
}

impl Presheaf {
    /// Builds a presheaf from fibers and any set of restrictions along pairs
    /// `x < y`. Restrictions along covers must be supplied whenever the lower
    /// fiber is nonempty; the rest are composed along covers. Every supplied
    /// and derived restriction must fit together functorially.
    pub fn new(
        base: Arc<FinitePoset>,
        fibers: Vec<Vec<String>>,
        given: &[((usize, usize), Vec<usize>)],
    ) -> Result<Presheaf, PresheafError> {
        let n = base.len();
        if fibers.len() != n {
            return Err(PresheafError::InvalidPresheaf(format!("{} fibers for a base of {} points", fibers.len(), n)));
        }
        let mut table: Vec<Option<Vec<usize>>> = vec![None; n * n];
        for x in 0..n {
            table[x * n + x] = Some((0..fibers[x].len()).collect());
        }
        for ((x, y), map) in given {
            let (x, y) = (*x, *y);
            if x >= n || y >= n {
                return Err(PosetError::IndexOutOfRange(x.max(y)).into());
            }
            if !base.leq(x, y) {
                return Err(PresheafError::InvalidPresheaf(format!(
                    "restriction along {} -> {} but {} is not below {}",
                    base.label(x),
                    base.label(y),
                    base.label(x),
                    base.label(y)
                )));
            }
            if map.len() != fibers[x].len() || map.iter().any(|&v| v >= fibers[y].len()) {
                return Err(PresheafError::InvalidPresheaf(format!(
                    "restriction {} -> {} is not a function between the fibers",
                    base.label(x),
                    base.label(y)
                )));
            }
            if let Some(existing) = &table[x * n + y] {
                if existing != map {
                    return Err(PresheafError::InvalidPresheaf(format!(
                        "conflicting restrictions along {} -> {}",
                        base.label(x),
                        base.label(y)
                    )));
                }
            }
            table[x * n + y] = Some(map.clone());
        }
        let covers = base.covers();
        for x in 0..n {
            for y in base.up(x).without(x).iter() {
                derive(&base, &fibers, &covers, &mut table, x, y)?;
            }
        }
        let sheaf = Presheaf { base, fibers, restrictions: table };
        sheaf.check_functoriality()?;
        Ok(sheaf)
    }

    /// Fibers of the given sizes labelled `0, 1, ...`.
    pub fn from_sizes(
        base: Arc<FinitePoset>,
        sizes: &[usize],
        given: &[((usize, usize), Vec<usize>)],
    ) -> Result<Presheaf, PresheafError> {
        let fibers = sizes.iter().map(|&k| (0..k).map(|i| i.to_string()).collect()).collect();
        Presheaf::new(base, fibers, given)
    }

    /// The constant singleton presheaf, terminal among presheaves on `base`.
    pub fn terminal(base: Arc<FinitePoset>) -> Presheaf {
        let n = base.len();
        let given: Vec<((usize, usize), Vec<usize>)> = base.covers().into_iter().map(|c| (c, vec![0])).collect();
        Presheaf::from_sizes(base, &vec![1; n], &given).expect("constant presheaf is functorial")
    }

    fn check_functoriality(&self) -> Result<(), PresheafError> {
        let n = self.base.len();
        for x in 0..n {
            for y in self.base.up(x).iter() {
                let xy = self.restriction(x, y);
                for z in self.base.up(y).iter() {
                    let yz = self.restriction(y, z);
                    let xz = self.restriction(x, z);
                    if xy.iter().map(|&v| yz[v]).ne(xz.iter().copied()) {
                        return Err(PresheafError::InvalidPresheaf(format!(
                            "restrictions {} -> {} -> {} do not compose to {} -> {}",
                            self.base.label(x),
                            self.base.label(y),
                            self.base.label(z),
                            self.base.label(x),
                            self.base.label(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FinitePoset> {
        &self.base
    }

    pub fn fiber_size(&self, x: usize) -> usize {
        self.fibers[x].len()
    }

    pub fn fiber_labels(&self, x: usize) -> &[String] {
        &self.fibers[x]
    }

    /// `F_{xy}` as an index table; panics unless `x ≤ y`.
    pub fn restriction(&self, x: usize, y: usize) -> &[usize] {
        self.restrictions[x * self.base.len() + y].as_deref().expect("restriction requested along a non-relation")
    }

    /// `ξ|_{xy}`
    pub fn restrict(&self, x: usize, y: usize, xi: usize) -> usize {
        self.restriction(x, y)[xi]
    }

    pub fn cover_restrictions(&self) -> Vec<((usize, usize), Vec<usize>)> {
        self.base.covers().into_iter().map(|(x, y)| ((x, y), self.restriction(x, y).to_vec())).collect()
    }

    /// Start of each fiber in the Grothendieck total.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.fibers
            .iter()
            .map(|f| {
                let o = acc;
                acc += f.len();
                o
            })
            .collect()
    }

    pub fn total_size(&self) -> usize {
        self.fibers.iter().map(Vec::len).sum()
    }

    /// Pointwise product `(F × G)(x) = F(x) × G(x)`, pairs in lexicographic order.
    pub fn product(&self, other: &Presheaf) -> Result<Presheaf, PresheafError> {
        if !self.base.same_order(&other.base) {
            return Err(PresheafError::BaseMismatch);
        }
        let n = self.base.len();
        let fibers: Vec<Vec<String>> = (0..n)
            .map(|x| {
                let mut f = Vec::new();
                for a in &self.fibers[x] {
                    for b in &other.fibers[x] {
                        f.push(format!("({a},{b})"));
                    }
                }
                f
            })
            .collect();
        let given: Vec<((usize, usize), Vec<usize>)> = self
            .base
            .covers()
            .into_iter()
            .map(|(x, y)| {
                let (gx, gy) = (other.fiber_size(x), other.fiber_size(y));
                let map = (0..self.fiber_size(x) * gx)
                    .map(|p| {
                        let (i, j) = (p / gx, p % gx);
                        self.restrict(x, y, i) * gy + other.restrict(x, y, j)
                    })
                    .collect();
                ((x, y), map)
            })
            .collect();
        Presheaf::new(self.base.clone(), fibers, &given)
    }
}

fn derive(
    base: &FinitePoset,
    fibers: &[Vec<String>],
    covers: &[(usize, usize)],
    table: &mut [Option<Vec<usize>>],
    x: usize,
    y: usize,
) -> Result<(), PresheafError> {
    let n = base.len();
    if table[x * n + y].is_some() {
        return Ok(());
    }
    if fibers[x].is_empty() {
        table[x * n + y] = Some(Vec::new());
        return Ok(());
    }
    let &(_, z) = covers.iter().find(|&&(a, z)| a == x && base.leq(z, y)).expect("x < y has a cover of x below y");
    if z == y {
        return Err(PresheafError::InvalidPresheaf(format!(
            "missing restriction along the cover {} -> {}",
            base.label(x),
            base.label(y)
        )));
    }
    if table[x * n + z].is_none() {
        return Err(PresheafError::InvalidPresheaf(format!(
            "missing restriction along the cover {} -> {}",
            base.label(x),
            base.label(z)
        )));
    }
    derive(base, fibers, covers, table, z, y)?;
    let xz = table[x * n + z].as_ref().unwrap();
    let zy = table[z * n + y].as_ref().unwrap();
    let composed = xz.iter().map(|&v| zy[v]).collect();
    table[x * n + y] = Some(composed);
    Ok(())
}

/// A strict p-morphism `total → base`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    projection: PosetMap,
}

impl Bundle {
    pub fn new(projection: PosetMap) -> Result<Bundle, PresheafError> {
        if let Some((x1, x2)) = projection.monotonicity_violation() {
            let d = projection.domain();
            return Err(PresheafError::NotStrict(format!(
                "{} <= {} but their images are not ordered",
                d.label(x1),
                d.label(x2)
            )));
        }
        if let Some((x, y)) = projection.back_condition_violation() {
            return Err(PresheafError::NotStrict(format!(
                "no element above {} maps to {}",
                projection.domain().label(x),
                projection.codomain().label(y)
            )));
        }
        if let Some((x, x1, x2)) = projection.strictness_violation() {
            let d = projection.domain();
            return Err(PresheafError::NotStrict(format!(
                "{} and {} above {} both map to {}",
                d.label(x1),
                d.label(x2),
                d.label(x),
                projection.codomain().label(projection.apply(x1))
            )));
        }
        Ok(Bundle { projection })
    }

    pub fn total(&self) -> &Arc<FinitePoset> {
        self.projection.domain()
    }

    pub fn base(&self) -> &Arc<FinitePoset> {
        self.projection.codomain()
    }

    pub fn projection(&self) -> &PosetMap {
        &self.projection
    }

    pub fn fiber(&self, x: usize) -> Subset {
        self.projection.fiber(x)
    }
}

/// `∫F → X`: points `(x, ξ)` with `(x₁,ξ₁) ≤ (x₂,ξ₂)` iff `x₁ ≤ x₂` and
/// `F_{x₁x₂}(ξ₁) = ξ₂`.
pub fn grothendieck(f: &Presheaf) -> Result<Bundle, PresheafError> {
    let base = f.base();
    let n = base.len();
    if f.total_size() > MAX_ELEMENTS {
        return Err(PosetError::TooManyElements(f.total_size()).into());
    }
    let mut points = Vec::with_capacity(f.total_size());
    let mut labels = Vec::with_capacity(f.total_size());
    for x in 0..n {
        for (i, l) in f.fibers[x].iter().enumerate() {
            points.push((x, i));
            labels.push(format!("{}:{}", base.label(x), l));
        }
    }
    let total = FinitePoset::from_relation(labels, |p, q| {
        let (x1, i1) = points[p];
        let (x2, i2) = points[q];
        base.leq(x1, x2) && f.restrict(x1, x2, i1) == i2
    })
    .map_err(|e| PresheafError::InvalidPresheaf(format!("total is not a poset: {e}")))?;
    let images = points.iter().map(|&(x, _)| x).collect();
    let projection = PosetMap::new(Arc::new(total), base.clone(), images)?;
    Bundle::new(projection)
}

/// `F(x) = π⁻¹(x)`, with `F_{xy}(ξ)` the unique point above `ξ` over `y`.
pub fn fiber_presheaf(b: &Bundle) -> Result<Presheaf, PresheafError> {
    let proj = b.projection();
    if let Some((x, x1, x2)) = proj.strictness_violation() {
        let d = proj.domain();
        return Err(PresheafError::NotStrict(format!(
            "{} and {} above {} share an image",
            d.label(x1),
            d.label(x2),
            d.label(x)
        )));
    }
    let (base, total) = (b.base(), b.total());
    let n = base.len();
    let members: Vec<Vec<usize>> = (0..n).map(|x| b.fiber(x).iter().collect()).collect();
    let position: HashMap<usize, usize> =
        members.iter().flat_map(|m| m.iter().enumerate().map(|(i, &p)| (p, i))).collect();
    let fibers = members.iter().map(|m| m.iter().map(|&p| total.label(p).to_string()).collect()).collect();
    let mut given = Vec::new();
    for (x, y) in base.covers() {
        let mut map = Vec::with_capacity(members[x].len());
        for &p in &members[x] {
            let above = total.up(p).intersection(b.fiber(y));
            let q = above.iter().next().ok_or_else(|| {
                PresheafError::NotStrict(format!("nothing above {} over {}", total.label(p), base.label(y)))
            })?;
            map.push(position[&q]);
        }
        given.push(((x, y), map));
    }
    Presheaf::new(base.clone(), fibers, &given)
}

/// An order-isomorphism of totals commuting with the projections.
pub fn find_iso_over(b1: &Bundle, b2: &Bundle) -> Option<Vec<usize>> {
    let (t1, t2) = (b1.total(), b2.total());
    if t1.len() != t2.len() || !b1.base().same_order(b2.base()) {
        return None;
    }
    let p1 = b1.projection();
    let p2 = b2.projection();
    if (0..b1.base().len()).any(|x| b1.fiber(x).len() != b2.fiber(x).len()) {
        return None;
    }
    let degree = |t: &FinitePoset, p: usize| (t.up(p).len(), t.down(p).len());
    // Same fiber and same up/down degree.
    let candidates: Vec<Subset> = (0..t1.len())
        .map(|i| p2.fiber(p1.apply(i)).iter().filter(|&j| degree(t1, i) == degree(t2, j)).collect())
        .collect();
    let mut assignment = vec![usize::MAX; t1.len()];
    let mut used = Subset::EMPTY;
    fn go(
        i: usize,
        t1: &FinitePoset,
        t2: &FinitePoset,
        candidates: &[Subset],
        assignment: &mut Vec<usize>,
        used: &mut Subset,
    ) -> bool {
        if i == t1.len() {
            return true;
        }
        for j in candidates[i].difference(*used).iter() {
            let ok = (0..i).all(|k| {
                let m = assignment[k];
                t1.leq(k, i) == t2.leq(m, j) && t1.leq(i, k) == t2.leq(j, m)
            });
            if !ok {
                continue;
            }
            assignment[i] = j;
            *used = used.with(j);
            if go(i + 1, t1, t2, candidates, assignment, used) {
                return true;
            }
            *used = used.without(j);
        }
        false
    }
    go(0, t1, t2, &candidates, &mut assignment, &mut used).then_some(assignment)
}

/// A family of fiber bijections `F(x) → G(x)` commuting with restrictions.
pub fn find_presheaf_iso(f: &Presheaf, g: &Presheaf) -> Option<Vec<Vec<usize>>> {
    let base = f.base();
    if !base.same_order(g.base()) {
        return None;
    }
    let n = base.len();
    if (0..n).any(|x| f.fiber_size(x) != g.fiber_size(x)) {
        return None;
    }
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..f.fiber_size(x)).map(move |i| (x, i))).collect();
    let mut phi: Vec<Vec<usize>> = (0..n).map(|x| vec![usize::MAX; f.fiber_size(x)]).collect();
    let mut used: Vec<Vec<bool>> = (0..n).map(|x| vec![false; g.fiber_size(x)]).collect();

    fn consistent(f: &Presheaf, g: &Presheaf, phi: &[Vec<usize>], x: usize, i: usize) -> bool {
        let base = f.base();
        let j = phi[x][i];
        // Against everything already placed below and above (x, i).
        for y in base.up(x).iter() {
            let k = f.restrict(x, y, i);
            let pk = phi[y][k];
            if pk != usize::MAX && pk != g.restrict(x, y, j) {
                return false;
            }
        }
        for w in base.down(x).iter() {
            for (l, &pl) in phi[w].iter().enumerate() {
                if pl != usize::MAX && f.restrict(w, x, l) == i && g.restrict(w, x, pl) != j {
                    return false;
                }
            }
        }
        true
    }

    fn go(
        s: usize,
        slots: &[(usize, usize)],
        f: &Presheaf,
        g: &Presheaf,
        phi: &mut Vec<Vec<usize>>,
        used: &mut Vec<Vec<bool>>,
    ) -> bool {
        let Some(&(x, i)) = slots.get(s) else {
            return true;
        };
        for j in 0..g.fiber_size(x) {
            if used[x][j] {
                continue;
            }
            phi[x][i] = j;
            if consistent(f, g, phi, x, i) {
                used[x][j] = true;
                if go(s + 1, slots, f, g, phi, used) {
                    return true;
                }
                used[x][j] = false;
            }
            phi[x][i] = usize::MAX;
        }
        false
    }

    go(0, &slots, f, g, &mut phi, &mut used).then_some(phi)
}

/// `Ψ(Φ(b)) ≅ b` over the base.
pub fn round_trip_total(b: &Bundle) -> bool {
    fiber_presheaf(b).and_then(|f| grothendieck(&f)).map(|back| find_iso_over(b, &back).is_some()).unwrap_or(false)
}

/// `Φ(Ψ(F)) ≅ F`.
pub fn round_trip_presheaf(f: &Presheaf) -> bool {
    grothendieck(f).and_then(|b| fiber_presheaf(&b)).map(|back| find_presheaf_iso(f, &back).is_some()).unwrap_or(false)
}

/// A natural transformation between presheaves on the same base.
#[derive(Debug, Clone, PartialEq)]
pub struct PresheafMorphism {
    source: Presheaf,
    target: Presheaf,
    components: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn new(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> Result<Self, PresheafError> {
        if !source.base.same_order(&target.base) {
            return Err(PresheafError::BaseMismatch);
        }
        let base = source.base.clone();
        let n = base.len();
        if components.len() != n {
            return Err(PresheafError::NotNatural("wrong number of components".into()));
        }
        for (x, component) in components.iter().enumerate() {
            if component.len() != source.fiber_size(x) || component.iter().any(|&v| v >= target.fiber_size(x)) {
                return Err(PresheafError::NotNatural(format!("component at {} is not a function", base.label(x))));
            }
        }
        for (x, y) in base.covers() {
            for i in 0..source.fiber_size(x) {
                if components[y][source.restrict(x, y, i)] != target.restrict(x, y, components[x][i]) {
                    return Err(PresheafError::NotNatural(format!(
                        "square {} -> {} does not commute",
                        base.label(x),
                        base.label(y)
                    )));
                }
            }
        }
        Ok(PresheafMorphism { source, target, components })
    }

    pub fn component(&self, x: usize) -> &[usize] {
        &self.components[x]
    }

    /// `Ψ(γ)`: the induced map of Grothendieck totals.
    pub fn total_map(&self, source: &Bundle, target: &Bundle) -> Result<PosetMap, PresheafError> {
        let so = self.source.offsets();
        let to = self.target.offsets();
        let mut images = vec![0; self.source.total_size()];
        for x in 0..self.source.base.len() {
            for (i, &j) in self.components[x].iter().enumerate() {
                images[so[x] + i] = to[x] + j;
            }
        }
        Ok(PosetMap::new(source.total().clone(), target.total().clone(), images)?)
    }
}

/// A subpresheaf `F' ⊆ F`, one bit pattern per fiber.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subfunctor {
    parts: Vec<u64>,
}

impl Subfunctor {
    pub fn contains(&self, x: usize, xi: usize) -> bool {
        (self.parts[x] >> xi) & 1 == 1
    }

    pub fn part(&self, x: usize) -> Subset {
        Subset(self.parts[x])
    }

    /// `⨿ F'(x)` as a subset of the Grothendieck total.
    pub fn total_subset(&self, offsets: &[usize]) -> Subset {
        self.parts.iter().zip(offsets).fold(Subset::EMPTY, |acc, (&bits, &o)| acc.union(Subset(bits << o)))
    }
}

/// All subfunctors of `f`, enumerated over per-fiber subsets and ordered by
/// their image in the Grothendieck total.
pub fn subfunctor_upsets(f: &Presheaf) -> Vec<Subfunctor> {
    let base = f.base();
    let n = base.len();
    let covers = base.covers();
    let mut out = Vec::new();
    let mut parts = vec![0u64; n];
    fn go(x: usize, f: &Presheaf, covers: &[(usize, usize)], parts: &mut Vec<u64>, out: &mut Vec<Subfunctor>) {
        if x == parts.len() {
            let closed = covers.iter().all(|&(a, b)| {
                (0..f.fiber_size(a)).all(|i| (parts[a] >> i) & 1 == 0 || (parts[b] >> f.restrict(a, b, i)) & 1 == 1)
            });
            if closed {
                out.push(Subfunctor { parts: parts.clone() });
            }
            return;
        }
        for bits in 0..(1u64 << f.fiber_size(x)) {
            parts[x] = bits;
            go(x + 1, f, covers, parts, out);
        }
        parts[x] = 0;
    }
    go(0, f, &covers, &mut parts, &mut out);
    let offsets = f.offsets();
    out.sort_by_key(|s| s.total_subset(&offsets));
    out
}

/// The Heyting algebra of subfunctors: pointwise intersection and union,
/// and `F₁ ⇒ F₂` the largest subfunctor `W` with `W ∩ F₁ ⊆ F₂`.
pub struct SubfunctorAlgebra {
    presheaf: Presheaf,
    subfunctors: Vec<Subfunctor>,
    algebra: Arc<FiniteHeytingAlgebra>,
}

impl SubfunctorAlgebra {
    pub fn new(f: &Presheaf) -> Result<SubfunctorAlgebra, PresheafError> {
        let subs = subfunctor_upsets(f);
        let m = subs.len();
        let index: HashMap<&[u64], usize> = subs.iter().enumerate().map(|(i, s)| (s.parts.as_slice(), i)).collect();
        let pointwise = |a: &Subfunctor, b: &Subfunctor, op: fn(u64, u64) -> u64| -> u16 {
            let parts: Vec<u64> = a.parts.iter().zip(&b.parts).map(|(&p, &q)| op(p, q)).collect();
            index[parts.as_slice()] as u16
        };
        let mut meet = vec![0u16; m * m];
        let mut join = vec![0u16; m * m];
        for i in 0..m {
            for j in 0..m {
                meet[i * m + j] = pointwise(&subs[i], &subs[j], |p, q| p & q);
                join[i * m + j] = pointwise(&subs[i], &subs[j], |p, q| p | q);
            }
        }
        let below = |a: usize, b: usize| subs[a].parts.iter().zip(&subs[b].parts).all(|(&p, &q)| p & !q == 0);
        let mut implies = vec![0u16; m * m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = 0usize;
                for w in 0..m {
                    if below(meet[w * m + i] as usize, j) {
                        acc = join[acc * m + w] as usize;
                    }
                }
                implies[i * m + j] = acc as u16;
            }
        }
        let offsets = f.offsets();
        let point_labels: Vec<String> = (0..f.base.len())
            .flat_map(|x| f.fibers[x].iter().map(move |l| (x, l)))
            .map(|(x, l)| format!("{}:{}", f.base.label(x), l))
            .collect();
        let labels = subs
            .iter()
            .map(|s| {
                let names: Vec<&str> = s.total_subset(&offsets).iter().map(|p| point_labels[p].as_str()).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        let algebra = FiniteHeytingAlgebra::from_tables(labels, meet, join, implies, 0, m - 1)?;
        Ok(SubfunctorAlgebra { presheaf: f.clone(), subfunctors: subs, algebra: Arc::new(algebra) })
    }

    pub fn algebra(&self) -> &Arc<FiniteHeytingAlgebra> {
        &self.algebra
    }

    pub fn subfunctors(&self) -> &[Subfunctor] {
        &self.subfunctors
    }

    /// `m_{x,ξ}: F' ↦ {y ≥ x | ξ|_{xy} ∈ F'(y)}`, into `Up(↑x)`.
    pub fn m_component(&self, x: usize, xi: usize) -> Result<HeytingHom, PresheafError> {
        let f = &self.presheaf;
        let base = f.base();
        if x >= base.len() {
            return Err(PosetError::IndexOutOfRange(x).into());
        }
        if xi >= f.fiber_size(x) {
            return Err(PresheafError::UnknownFiberElement(base.label(x).to_string(), xi));
        }
        let (up_x, keep) = base.induced(base.up(x));
        let codomain = Arc::new(FiniteHeytingAlgebra::upset_algebra(Arc::new(up_x))?);
        let carrier = codomain.upsets().expect("upset algebra");
        let images = self
            .subfunctors
            .iter()
            .map(|s| {
                let hit: Subset = keep
                    .iter()
                    .enumerate()
                    .filter(|&(_, &y)| s.contains(y, f.restrict(x, y, xi)))
                    .map(|(k, _)| k)
                    .collect();
                carrier.index_of(hit).expect("m-image is an upset of the principal upset")
            })
            .collect();
        Ok(HeytingHom::new(self.algebra.clone(), codomain, images)?)
    }

    /// All `m_{x,ξ}` side by side: a map into `∏_{x,ξ} Up(↑x)`.
    pub fn product_embedding(&self) -> Result<ProductEmbedding, PresheafError> {
        let f = &self.presheaf;
        let mut components = Vec::new();
        for x in 0..f.base().len() {
            for xi in 0..f.fiber_size(x) {
                components.push(((x, xi), self.m_component(x, xi)?));
            }
        }
        Ok(ProductEmbedding { domain: self.algebra.clone(), components })
    }
}

/// A homomorphism into a finite product, kept as its components.
pub struct ProductEmbedding {
    domain: Arc<FiniteHeytingAlgebra>,
    components: Vec<((usize, usize), HeytingHom)>,
}

impl ProductEmbedding {
    pub fn components(&self) -> &[((usize, usize), HeytingHom)] {
        &self.components
    }

    pub fn image(&self, a: usize) -> Vec<usize> {
        self.components.iter().map(|(_, h)| h.apply(a)).collect()
    }

    /// A map into a product preserves an operation iff every component does.
    pub fn is_homomorphism(&self) -> bool {
        self.components.iter().all(|(_, h)| h.is_homomorphism())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.domain.elements().all(|a| seen.insert(self.image(a)))
    }
}

pub fn m_component(f: &Presheaf, x: usize, xi: usize) -> Result<HeytingHom, PresheafError> {
    SubfunctorAlgebra::new(f)?.m_component(x, xi)
}

pub fn product_embedding(f: &Presheaf) -> Result<ProductEmbedding, PresheafError> {
    SubfunctorAlgebra::new(f)?.product_embedding()
}
