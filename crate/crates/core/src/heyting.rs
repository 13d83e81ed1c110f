//! Finite Heyting algebras.
//!
//! Elements are indices `0..n`, capped at [`MAX_CARRIER`]. General algebras
//! store meet, join and implication as `n × n` tables of `u16`. The upset
//! algebra of a small poset instead computes them on bit patterns and maps
//! the result back through a dense lookup, so building it costs `O(n)`.
//! Upset algebras keep the index-to-upset correspondence so that duality
//! and printing can get back to subsets of points.

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::duality::DualSpace;
use crate::poset::{FinitePoset, Subset};

pub const MAX_CARRIER: usize = u16::MAX as usize;

/// Posets up to this size get a dense mask-to-index lookup table.
const DENSE_LOOKUP_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeytingError {
    #[error("carrier of {0} elements exceeds the table limit of {MAX_CARRIER}")]
    TooLarge(usize),
    #[error("an algebra needs at least one element")]
    EmptyCarrier,
    #[error("operation table `{0}` has the wrong shape or out-of-range entries")]
    TableShape(&'static str),
    #[error("order is not a lattice: {0}")]
    NotALattice(String),
    #[error("lattice has no relative pseudocomplement for {0}")]
    NotHeyting(String),
    #[error("map has {got} images but its domain has {expected} elements")]
    MapArity { expected: usize, got: usize },
    #[error("map sends element {0} outside the codomain")]
    ImageOutOfRange(usize),
    #[error("homomorphisms do not compose")]
    NotComposable,
}

/// The index-to-upset correspondence of an upset algebra `Up(X)`.
#[derive(Clone)]
pub struct UpsetCarrier {
    points: Arc<FinitePoset>,
    masks: Vec<Subset>,
    dense: Option<Vec<u32>>,
    down: Vec<Subset>,
}

impl UpsetCarrier {
    pub fn points(&self) -> &Arc<FinitePoset> {
        &self.points
    }

    /// Upsets in canonical (ascending bit pattern) order; position = element index.
    pub fn masks(&self) -> &[Subset] {
        &self.masks
    }

    pub fn mask(&self, a: usize) -> Subset {
        self.masks[a]
    }

    pub fn index_of(&self, u: Subset) -> Option<usize> {
        match &self.dense {
            Some(table) => table.get(u.0 as usize).copied().filter(|&i| i != u32::MAX).map(|i| i as usize),
            None => self.masks.binary_search(&u).ok(),
        }
    }

    #[inline]
    fn dense_index(&self, u: Subset) -> usize {
        self.dense.as_ref().expect("dense lookup")[u.0 as usize] as usize
    }

    /// `U ⇒ V` is the complement of the downward closure of `U \ V`.
    #[inline]
    fn implication_mask(&self, u: Subset, v: Subset) -> Subset {
        let blocked = u.difference(v).iter().fold(Subset::EMPTY, |acc, x| acc.union(self.down[x]));
        self.points.carrier().difference(blocked)
    }
}

#[derive(Clone)]
enum Operations {
    Tables {
        meet: Vec<u16>,
        join: Vec<u16>,
        implies: Vec<u16>,
    },
    /// Computed on the masks of the upset carrier.
    Masks,
}

#[derive(Clone)]
pub struct FiniteHeytingAlgebra {
    labels: Vec<String>,
    ops: Operations,
    bottom: usize,
    top: usize,
    upsets: Option<UpsetCarrier>,
    join_irreducibles: OnceLock<Vec<usize>>,
    dual: OnceLock<Arc<DualSpace>>,
}

impl fmt::Debug for FiniteHeytingAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteHeytingAlgebra").field("size", &self.len()).field("labels", &self.labels).finish()
    }
}

/// Equal operations on the same index set; labels are ignored.
impl PartialEq for FiniteHeytingAlgebra {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() || self.bottom != other.bottom || self.top != other.top {
            return false;
        }
        match (&self.ops, &other.ops, &self.upsets, &other.upsets) {
            (
                Operations::Tables { meet: m1, join: j1, implies: i1 },
                Operations::Tables { meet: m2, join: j2, implies: i2 },
                _,
                _,
            ) => m1 == m2 && j1 == j2 && i1 == i2,
            (Operations::Masks, Operations::Masks, Some(u1), Some(u2)) if u1.points.same_order(&u2.points) => true,
            _ => self.elements().all(|a| {
                other.elements().all(|b| {
                    self.meet(a, b) == other.meet(a, b)
                        && self.join(a, b) == other.join(a, b)
                        && self.implies(a, b) == other.implies(a, b)
                })
            }),
        }
    }
}

fn shape_ok(table: &[u16], n: usize) -> bool {
    table.len() == n * n && table.iter().all(|&v| (v as usize) < n)
}

impl FiniteHeytingAlgebra {
    /// Wraps raw tables. Only the shape is checked; use
    /// [`verify_heyting`](Self::verify_heyting) for the axioms.
    pub fn from_tables(
        labels: Vec<String>,
        meet: Vec<u16>,
        join: Vec<u16>,
        implies: Vec<u16>,
        bottom: usize,
        top: usize,
    ) -> Result<Self, HeytingError> {
        let n = labels.len();
        if n == 0 {
            return Err(HeytingError::EmptyCarrier);
        }
        if n > MAX_CARRIER {
            return Err(HeytingError::TooLarge(n));
        }
        if !shape_ok(&meet, n) {
            return Err(HeytingError::TableShape("meet"));
        }
        if !shape_ok(&join, n) {
            return Err(HeytingError::TableShape("join"));
        }
        if !shape_ok(&implies, n) {
            return Err(HeytingError::TableShape("implies"));
        }
        if bottom >= n || top >= n {
            return Err(HeytingError::TableShape("bounds"));
        }
        Ok(FiniteHeytingAlgebra {
            labels,
            ops: Operations::Tables { meet, join, implies },
            bottom,
            top,
            upsets: None,
            join_irreducibles: OnceLock::new(),
            dual: OnceLock::new(),
        })
    }

    /// Reads a finite lattice off its order and computes the implication
    /// `a ⇒ b = max {c | c ∧ a ≤ b}`.
    pub fn from_lattice_order(order: &FinitePoset) -> Result<Self, HeytingError> {
        let n = order.len();
        if n == 0 {
            return Err(HeytingError::EmptyCarrier);
        }
        let greatest_of = |s: Subset| s.iter().find(|&g| order.down(g) == s);
        let least_of = |s: Subset| s.iter().find(|&g| order.up(g) == s);
        let mut meet = vec![0u16; n * n];
        let mut join = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower = order.down(a).intersection(order.down(b));
                let g = greatest_of(lower).ok_or_else(|| {
                    HeytingError::NotALattice(format!("no meet of {} and {}", order.label(a), order.label(b)))
                })?;
                let upper = order.up(a).intersection(order.up(b));
                let l = least_of(upper).ok_or_else(|| {
                    HeytingError::NotALattice(format!("no join of {} and {}", order.label(a), order.label(b)))
                })?;
                meet[a * n + b] = g as u16;
                join[a * n + b] = l as u16;
            }
        }
        let bottom = order
            .minimal_elements()
            .iter()
            .next()
            .filter(|&b| order.up(b) == order.carrier())
            .ok_or_else(|| HeytingError::NotALattice("no least element".into()))?;
        let top = order
            .maximal_elements()
            .iter()
            .next()
            .filter(|&t| order.down(t) == order.carrier())
            .ok_or_else(|| HeytingError::NotALattice("no greatest element".into()))?;
        let mut implies = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let admissible: Subset = (0..n).filter(|&c| order.leq(meet[c * n + a] as usize, b)).collect();
                let g = greatest_of(admissible)
                    .ok_or_else(|| HeytingError::NotHeyting(format!("{} => {}", order.label(a), order.label(b))))?;
                implies[a * n + b] = g as u16;
            }
        }
        Self::from_tables(order.labels().to_vec(), meet, join, implies, bottom, top)
    }

    /// `Up(X)`: all upsets of `X` under intersection and union, with
    /// `U ⇒ V = {x | ↑x ∩ U ⊆ V}`.
    pub fn upset_algebra(points: Arc<FinitePoset>) -> Result<Self, HeytingError> {
        let masks = points.all_upsets();
        let n = masks.len();
        if n > MAX_CARRIER {
            return Err(HeytingError::TooLarge(n));
        }
        let dense = (points.len() <= DENSE_LOOKUP_POINTS).then(|| {
            let mut t = vec![u32::MAX; 1usize << points.len()];
            for (i, m) in masks.iter().enumerate() {
                t[m.0 as usize] = i as u32;
            }
            t
        });
        let down = (0..points.len()).map(|x| points.down(x)).collect();
        let carrier = UpsetCarrier { points: points.clone(), masks, dense, down };
        let labels: Vec<String> = carrier.masks.iter().map(|&u| points.format_subset(u)).collect();
        let top = n - 1;
        if carrier.dense.is_some() {
            let join_irreducibles = OnceLock::new();
            let mut principal: Vec<usize> = (0..points.len()).map(|x| carrier.dense_index(points.up(x))).collect();
            principal.sort_unstable();
            let _ = join_irreducibles.set(principal);
            return Ok(FiniteHeytingAlgebra {
                labels,
                ops: Operations::Masks,
                bottom: 0,
                top,
                upsets: Some(carrier),
                join_irreducibles,
                dual: OnceLock::new(),
            });
        }

        let idx = |u: Subset| carrier.index_of(u).expect("closed under the upset operations") as u16;
        let mut meet = vec![0u16; n * n];
        let mut join = vec![0u16; n * n];
        let mut implies = vec![0u16; n * n];
        for i in 0..n {
            let u = carrier.masks[i];
            for j in i..n {
                let v = carrier.masks[j];
                let m = idx(u.intersection(v));
                let jn = idx(u.union(v));
                meet[i * n + j] = m;
                meet[j * n + i] = m;
                join[i * n + j] = jn;
                join[j * n + i] = jn;
            }
            for j in 0..n {
                implies[i * n + j] = idx(carrier.implication_mask(u, carrier.masks[j]));
            }
        }
        let mut alg = Self::from_tables(labels, meet, join, implies, 0, top)?;
        alg.upsets = Some(carrier);
        Ok(alg)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The one-element algebra, where bottom = top.
    pub fn is_degenerate(&self) -> bool {
        self.bottom == self.top
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn upsets(&self) -> Option<&UpsetCarrier> {
        self.upsets.as_ref()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    #[inline]
    fn mask_carrier(&self) -> &UpsetCarrier {
        self.upsets.as_ref().expect("mask operations need the upset carrier")
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        match &self.ops {
            Operations::Tables { meet, .. } => meet[a * self.len() + b] as usize,
            Operations::Masks => {
                let c = self.mask_carrier();
                c.dense_index(c.masks[a].intersection(c.masks[b]))
            }
        }
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        match &self.ops {
            Operations::Tables { join, .. } => join[a * self.len() + b] as usize,
            Operations::Masks => {
                let c = self.mask_carrier();
                c.dense_index(c.masks[a].union(c.masks[b]))
            }
        }
    }

    #[inline]
    pub fn implies(&self, a: usize, b: usize) -> usize {
        match &self.ops {
            Operations::Tables { implies, .. } => implies[a * self.len() + b] as usize,
            Operations::Masks => {
                let c = self.mask_carrier();
                c.dense_index(c.implication_mask(c.masks[a], c.masks[b]))
            }
        }
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        match &self.ops {
            Operations::Masks => {
                let c = self.mask_carrier();
                c.masks[a].is_subset_of(c.masks[b])
            }
            Operations::Tables { .. } => self.meet(a, b) == a,
        }
    }

    /// `(a ⇒ b) ∧ (b ⇒ a)`
    pub fn biconditional(&self, a: usize, b: usize) -> usize {
        self.meet(self.implies(a, b), self.implies(b, a))
    }

    pub fn negation(&self, a: usize) -> usize {
        self.implies(a, self.bottom)
    }

    pub fn join_all<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_all<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn verify_heyting(&self) -> bool {
        self.heyting_law_violation().is_none()
    }

    /// Describes the first failed axiom, if any.
    pub fn heyting_law_violation(&self) -> Option<String> {
        let n = self.len();
        let l = |a: usize| self.label(a);
        for a in 0..n {
            if self.meet(a, a) != a || self.join(a, a) != a {
                return Some(format!("idempotence fails at {}", l(a)));
            }
            if self.meet(self.bottom, a) != self.bottom || self.meet(a, self.top) != a {
                return Some(format!("bounds fail at {}", l(a)));
            }
            for b in 0..n {
                if self.meet(a, b) != self.meet(b, a) || self.join(a, b) != self.join(b, a) {
                    return Some(format!("commutativity fails at {}, {}", l(a), l(b)));
                }
                if self.meet(a, self.join(a, b)) != a || self.join(a, self.meet(a, b)) != a {
                    return Some(format!("absorption fails at {}, {}", l(a), l(b)));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab_meet = self.meet(a, b);
                let ab_join = self.join(a, b);
                for c in 0..n {
                    if self.meet(ab_meet, c) != self.meet(a, self.meet(b, c))
                        || self.join(ab_join, c) != self.join(a, self.join(b, c))
                    {
                        return Some(format!("associativity fails at {}, {}, {}", l(a), l(b), l(c)));
                    }
                    if self.meet(a, self.join(b, c)) != self.join(ab_meet, self.meet(a, c)) {
                        return Some(format!("distributivity fails at {}, {}, {}", l(a), l(b), l(c)));
                    }
                    if self.leq(ab_meet, c) != self.leq(a, self.implies(b, c)) {
                        return Some(format!("residuation fails at {}, {}, {}", l(a), l(b), l(c)));
                    }
                }
            }
        }
        None
    }

    /// Elements `a ≠ ⊥` that are not the join of the elements strictly below them.
    pub fn join_irreducibles(&self) -> &[usize] {
        self.join_irreducibles.get_or_init(|| {
            (0..self.len())
                .filter(|&a| a != self.bottom)
                .filter(|&a| {
                    let below = (0..self.len()).filter(|&b| b != a && self.leq(b, a));
                    self.join_all(below) != a
                })
                .collect()
        })
    }

    pub(crate) fn dual_cache(&self) -> &OnceLock<Arc<DualSpace>> {
        &self.dual
    }

    /// Hasse diagram of the lattice order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b || !self.leq(a, b) {
                    continue;
                }
                let between = (0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The lattice order as a poset, for carriers of at most 64 elements.
    pub fn order_poset(&self) -> Option<FinitePoset> {
        FinitePoset::from_relation(self.labels.clone(), |a, b| self.leq(a, b)).ok()
    }
}

/// Searches for a lattice isomorphism `A → B` sending each `p` to `q` for
/// every `(p, q)` in `fixed`.
///
/// Candidates are bijections between join-irreducibles that preserve the
/// induced order, the number of join-irreducibles below, and membership
/// below each fixed element; each is extended by joins and then checked to
/// be an order isomorphism.
pub fn find_isomorphism(
    a: &FiniteHeytingAlgebra,
    b: &FiniteHeytingAlgebra,
    fixed: &[(usize, usize)],
) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let ja = a.join_irreducibles();
    let jb = b.join_irreducibles();
    if ja.len() != jb.len() {
        return None;
    }
    let profile = |alg: &FiniteHeytingAlgebra, js: &[usize], j: usize, side: bool| {
        let below = js.iter().filter(|&&k| alg.leq(k, j)).count();
        let above = js.iter().filter(|&&k| alg.leq(j, k)).count();
        let sig: Vec<bool> = fixed.iter().map(|&(p, q)| alg.leq(j, if side { p } else { q })).collect();
        (below, above, sig)
    };
    let pa: Vec<_> = ja.iter().map(|&j| profile(a, ja, j, true)).collect();
    let pb: Vec<_> = jb.iter().map(|&j| profile(b, jb, j, false)).collect();
    let candidates: Vec<Vec<usize>> = pa.iter().map(|p| (0..jb.len()).filter(|&t| pb[t] == *p).collect()).collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut search = IsoSearch {
        a,
        b,
        ja,
        jb,
        candidates,
        fixed,
        assignment: vec![usize::MAX; ja.len()],
        used: vec![false; jb.len()],
    };
    search.run(0)
}

struct IsoSearch<'a> {
    a: &'a FiniteHeytingAlgebra,
    b: &'a FiniteHeytingAlgebra,
    ja: &'a [usize],
    jb: &'a [usize],
    candidates: Vec<Vec<usize>>,
    fixed: &'a [(usize, usize)],
    assignment: Vec<usize>,
    used: Vec<bool>,
}

impl IsoSearch<'_> {
    fn run(&mut self, i: usize) -> Option<Vec<usize>> {
        if i == self.ja.len() {
            return self.extend_and_check();
        }
        for ci in 0..self.candidates[i].len() {
            let t = self.candidates[i][ci];
            if self.used[t] {
                continue;
            }
            let consistent = (0..i).all(|k| {
                let s = self.assignment[k];
                self.a.leq(self.ja[k], self.ja[i]) == self.b.leq(self.jb[s], self.jb[t])
                    && self.a.leq(self.ja[i], self.ja[k]) == self.b.leq(self.jb[t], self.jb[s])
            });
            if !consistent {
                continue;
            }
            self.assignment[i] = t;
            self.used[t] = true;
            if let Some(found) = self.run(i + 1) {
                return Some(found);
            }
            self.used[t] = false;
        }
        self.assignment[i] = usize::MAX;
        None
    }

    fn extend_and_check(&self) -> Option<Vec<usize>> {
        let (a, b) = (self.a, self.b);
        let phi: Vec<usize> = (0..a.len())
            .map(|x| {
                let parts = (0..self.ja.len()).filter(|&k| a.leq(self.ja[k], x)).map(|k| self.jb[self.assignment[k]]);
                b.join_all(parts)
            })
            .collect();
        let mut hit = vec![false; b.len()];
        for &y in &phi {
            if std::mem::replace(&mut hit[y], true) {
                return None;
            }
        }
        if self.fixed.iter().any(|&(p, q)| phi[p] != q) {
            return None;
        }
        // Meet, join and implication are all determined by the order, so a
        // bijection that preserves and reflects it is a Heyting isomorphism.
        let n = a.len();
        for x in 0..n {
            for y in 0..n {
                if a.leq(x, y) != b.leq(phi[x], phi[y]) {
                    return None;
                }
            }
        }
        Some(phi)
    }
}

pub fn is_isomorphic(a: &FiniteHeytingAlgebra, b: &FiniteHeytingAlgebra) -> bool {
    find_isomorphism(a, b, &[]).is_some()
}

/// A total function between algebra carriers.
#[derive(Clone)]
pub struct HeytingHom {
    domain: Arc<FiniteHeytingAlgebra>,
    codomain: Arc<FiniteHeytingAlgebra>,
    images: Vec<usize>,
}

impl fmt::Debug for HeytingHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<(&str, &str)> =
            (0..self.domain.len()).map(|x| (self.domain.label(x), self.codomain.label(self.images[x]))).collect();
        f.debug_struct("HeytingHom").field("assignment", &pairs).finish()
    }
}

impl PartialEq for HeytingHom {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
            && (Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain)
            && (Arc::ptr_eq(&self.codomain, &other.codomain) || *self.codomain == *other.codomain)
    }
}

impl HeytingHom {
    pub fn new(
        domain: Arc<FiniteHeytingAlgebra>,
        codomain: Arc<FiniteHeytingAlgebra>,
        images: Vec<usize>,
    ) -> Result<Self, HeytingError> {
        if images.len() != domain.len() {
            return Err(HeytingError::MapArity { expected: domain.len(), got: images.len() });
        }
        if let Some(x) = images.iter().position(|&y| y >= codomain.len()) {
            return Err(HeytingError::ImageOutOfRange(x));
        }
        Ok(HeytingHom { domain, codomain, images })
    }

    pub fn identity(a: Arc<FiniteHeytingAlgebra>) -> Self {
        let images = (0..a.len()).collect();
        HeytingHom { domain: a.clone(), codomain: a, images }
    }

    pub fn domain(&self) -> &Arc<FiniteHeytingAlgebra> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FiniteHeytingAlgebra> {
        &self.codomain
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, a: usize) -> usize {
        self.images[a]
    }

    /// `self ∘ first`
    pub fn after(&self, first: &HeytingHom) -> Result<HeytingHom, HeytingError> {
        if !Arc::ptr_eq(&first.codomain, &self.domain) && *first.codomain != *self.domain {
            return Err(HeytingError::NotComposable);
        }
        let images = first.images.iter().map(|&y| self.images[y]).collect();
        Ok(HeytingHom { domain: first.domain.clone(), codomain: self.codomain.clone(), images })
    }

    /// Names the first operation instance that is not preserved.
    pub fn homomorphism_violation(&self) -> Option<String> {
        self.violation(true)
    }

    pub fn lattice_homomorphism_violation(&self) -> Option<String> {
        self.violation(false)
    }

    fn violation(&self, with_implication: bool) -> Option<String> {
        let (d, c, h) = (&*self.domain, &*self.codomain, &self.images);
        if h[d.bottom()] != c.bottom() {
            return Some("bottom is not preserved".into());
        }
        if h[d.top()] != c.top() {
            return Some("top is not preserved".into());
        }
        for a in d.elements() {
            for b in d.elements() {
                let (ha, hb) = (h[a], h[b]);
                if h[d.meet(a, b)] != c.meet(ha, hb) {
                    return Some(format!("meet of {} and {}", d.label(a), d.label(b)));
                }
                if h[d.join(a, b)] != c.join(ha, hb) {
                    return Some(format!("join of {} and {}", d.label(a), d.label(b)));
                }
                if with_implication && h[d.implies(a, b)] != c.implies(ha, hb) {
                    return Some(format!("implication {} => {}", d.label(a), d.label(b)));
                }
            }
        }
        None
    }

    /// Preserves meet, join, implication, bottom and top.
    pub fn is_homomorphism(&self) -> bool {
        self.homomorphism_violation().is_none()
    }

    /// Preserves meet, join, bottom and top.
    pub fn is_lattice_homomorphism(&self) -> bool {
        self.lattice_homomorphism_violation().is_none()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain.len()];
        self.images.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.len() == self.codomain.len() && self.is_injective()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_bijective() && self.is_homomorphism()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::make_poset;

    fn up(p: FinitePoset) -> FiniteHeytingAlgebra {
        FiniteHeytingAlgebra::upset_algebra(Arc::new(p)).unwrap()
    }

    fn chain3() -> FiniteHeytingAlgebra {
        FiniteHeytingAlgebra::from_lattice_order(&FinitePoset::chain(&["0", "m", "1"]).unwrap()).unwrap()
    }

    fn boolean4() -> FiniteHeytingAlgebra {
        up(FinitePoset::antichain(&["a", "b"]).unwrap())
    }

    #[test]
    fn up_of_point_is_two_element_boolean() {
        let a = up(FinitePoset::antichain(&["pt"]).unwrap());
        assert_eq!(a.labels(), &["{}".to_string(), "{pt}".to_string()]);
        assert_eq!(a.negation(0), 1);
        assert_eq!(a.negation(1), 0);
        assert!(a.verify_heyting());
    }

    #[test]
    fn up_of_two_chain() {
        let a = up(make_poset(&["a", "b"], &[("a", "b")]).unwrap());
        assert_eq!(a.labels(), &["{}", "{b}", "{a,b}"]);
        assert!(a.leq(0, 1) && a.leq(1, 2));
        // {b} ⇒ ∅ = ∅
        assert_eq!(a.implies(1, 0), 0);
        // {b} ⇔ {a,b} = {b}
        assert_eq!(a.biconditional(1, 2), 1);
        assert!(a.verify_heyting());
    }

    #[test]
    fn up_of_antichain_is_boolean() {
        let a = boolean4();
        assert_eq!(a.labels(), &["{}", "{a}", "{b}", "{a,b}"]);
        // {a} ⇒ {b} = {b}
        assert_eq!(a.implies(1, 2), 2);
        for x in a.elements() {
            assert_eq!(a.join(x, a.negation(x)), a.top());
        }
    }

    #[test]
    fn lattice_order_constructor_matches_upset_algebra() {
        let c = chain3();
        assert!(c.verify_heyting());
        assert_eq!((c.bottom(), c.top()), (0, 2));
        assert_eq!(c.implies(1, 0), 0);
        assert_eq!(c.implies(0, 1), 2);
        assert_eq!(c.implies(2, 1), 1);
        assert!(is_isomorphic(&c, &up(FinitePoset::chain(&["a", "b"]).unwrap())));
    }

    #[test]
    fn non_lattices_and_non_heyting_lattices_are_rejected() {
        let v = make_poset(&["r", "s", "t"], &[("r", "s"), ("r", "t")]).unwrap();
        assert!(matches!(FiniteHeytingAlgebra::from_lattice_order(&v), Err(HeytingError::NotALattice(_))));
        // N5: 0 < a < c < 1, 0 < b < 1 is a lattice but not distributive, hence not Heyting.
        let n5 = make_poset(&["0", "a", "b", "c", "1"], &[("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")])
            .unwrap();
        assert!(matches!(FiniteHeytingAlgebra::from_lattice_order(&n5), Err(HeytingError::NotHeyting(_))));
        // M3 is not distributive either; x ⇒ 0 has no greatest candidate.
        let m3 = make_poset(
            &["0", "x", "y", "z", "1"],
            &[("0", "x"), ("0", "y"), ("0", "z"), ("x", "1"), ("y", "1"), ("z", "1")],
        )
        .unwrap();
        assert!(matches!(FiniteHeytingAlgebra::from_lattice_order(&m3), Err(HeytingError::NotHeyting(_))));
    }

    #[test]
    fn corrupted_implication_table_fails_verification() {
        let c = chain3();
        let n = c.len();
        let table = |op: fn(&FiniteHeytingAlgebra, usize, usize) -> usize| -> Vec<u16> {
            (0..n * n).map(|k| op(&c, k / n, k % n) as u16).collect()
        };
        let mut implies = table(FiniteHeytingAlgebra::implies);
        // m ⇒ 0 = 0 in the 3-chain; claim it is m instead.
        implies[n] = 1;
        let bad = FiniteHeytingAlgebra::from_tables(
            c.labels().to_vec(),
            table(FiniteHeytingAlgebra::meet),
            table(FiniteHeytingAlgebra::join),
            implies,
            c.bottom(),
            c.top(),
        )
        .unwrap();
        assert!(!bad.verify_heyting());
        assert!(bad.heyting_law_violation().unwrap().contains("residuation"));
    }

    #[test]
    fn mask_and_table_operations_agree() {
        let labels = ["a", "b", "c", "d"].map(String::from).to_vec();
        let fast = up(FinitePoset::from_covers(labels, &[(0, 2), (1, 2), (1, 3)]).unwrap());
        let n = fast.len();
        let table = |op: fn(&FiniteHeytingAlgebra, usize, usize) -> usize| -> Vec<u16> {
            (0..n * n).map(|k| op(&fast, k / n, k % n) as u16).collect()
        };
        let slow = FiniteHeytingAlgebra::from_tables(
            fast.labels().to_vec(),
            table(FiniteHeytingAlgebra::meet),
            table(FiniteHeytingAlgebra::join),
            table(FiniteHeytingAlgebra::implies),
            fast.bottom(),
            fast.top(),
        )
        .unwrap();
        assert!(slow == fast && fast == slow);
        assert!(slow.verify_heyting());
        let generic: Vec<usize> = (0..n)
            .filter(|&a| a != slow.bottom())
            .filter(|&a| slow.join_all((0..n).filter(|&b| b != a && slow.leq(b, a))) != a)
            .collect();
        assert_eq!(fast.join_irreducibles(), &generic[..]);
    }

    #[test]
    fn one_element_algebra_is_degenerate_but_heyting() {
        let a = up(FinitePoset::empty());
        assert_eq!(a.len(), 1);
        assert!(a.is_degenerate());
        assert!(a.verify_heyting());
        assert!(a.join_irreducibles().is_empty());
    }

    #[test]
    fn table_shape_is_checked() {
        let err = FiniteHeytingAlgebra::from_tables(vec!["x".into()], vec![], vec![0], vec![0], 0, 0);
        assert_eq!(err.unwrap_err(), HeytingError::TableShape("meet"));
        assert_eq!(
            FiniteHeytingAlgebra::from_tables(vec![], vec![], vec![], vec![], 0, 0).unwrap_err(),
            HeytingError::EmptyCarrier
        );
    }

    #[test]
    fn biconditional_basics() {
        for a in [chain3(), boolean4()] {
            for x in a.elements() {
                assert_eq!(a.biconditional(x, x), a.top());
            }
            assert_eq!(a.biconditional(a.bottom(), a.top()), a.bottom());
        }
    }

    #[test]
    fn join_irreducibles_examples() {
        assert_eq!(boolean4().join_irreducibles(), &[1, 2]);
        let labels: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let chain5 = FiniteHeytingAlgebra::from_lattice_order(&FinitePoset::chain(&labels).unwrap()).unwrap();
        assert_eq!(chain5.join_irreducibles(), &[1, 2, 3, 4]);
        let v = up(make_poset(&["r", "s", "t"], &[("r", "s"), ("r", "t")]).unwrap());
        let names: Vec<&str> = v.join_irreducibles().iter().map(|&j| v.label(j)).collect();
        assert_eq!(names, vec!["{s}", "{t}", "{r,s,t}"]);
    }

    #[test]
    fn join_irreducibles_agree_with_decomposition_oracle() {
        // a is join-irreducible iff a ≠ ⊥ and a = b ∨ c forces a ∈ {b, c}.
        for alg in [chain3(), boolean4(), up(make_poset(&["r", "s", "t"], &[("r", "s"), ("r", "t")]).unwrap())] {
            let brute: Vec<usize> = alg
                .elements()
                .filter(|&a| a != alg.bottom())
                .filter(|&a| alg.elements().all(|b| alg.elements().all(|c| alg.join(b, c) != a || b == a || c == a)))
                .collect();
            assert_eq!(alg.join_irreducibles(), brute.as_slice());
        }
    }

    #[test]
    fn homomorphism_predicates() {
        let b = Arc::new(boolean4());
        assert!(HeytingHom::identity(b.clone()).is_homomorphism());
        let to_top = HeytingHom::new(b.clone(), b.clone(), vec![3; 4]).unwrap();
        assert!(!to_top.is_homomorphism());
        assert_eq!(to_top.homomorphism_violation().unwrap(), "bottom is not preserved");

        // A lattice homomorphism that is not Heyting: Up(C2) → 2, {b} ↦ 0.
        // It sends {b} ⇒ ∅ = ∅ to 0, while 0 ⇒ 0 = 1.
        let c2 = Arc::new(up(make_poset(&["a", "b"], &[("a", "b")]).unwrap()));
        let two = Arc::new(up(FinitePoset::antichain(&["pt"]).unwrap()));
        let h = HeytingHom::new(c2.clone(), two.clone(), vec![0, 0, 1]).unwrap();
        assert!(h.is_lattice_homomorphism());
        assert!(!h.is_homomorphism());
        assert!(HeytingHom::new(c2, two, vec![0, 1, 1]).unwrap().is_homomorphism());
    }

    #[test]
    fn isomorphism_search_respects_fixed_points() {
        let b = boolean4();
        let b2 = boolean4();
        let swap = find_isomorphism(&b, &b2, &[(1, 2)]).unwrap();
        assert_eq!(swap, vec![0, 2, 1, 3]);
        let id = find_isomorphism(&b, &b2, &[(1, 1)]).unwrap();
        assert_eq!(id, vec![0, 1, 2, 3]);
        assert!(find_isomorphism(&b, &b2, &[(1, 3)]).is_none());
        assert!(!is_isomorphic(&b, &chain3()));
        let chain4 =
            FiniteHeytingAlgebra::from_lattice_order(&FinitePoset::chain(&["0", "1", "2", "3"]).unwrap()).unwrap();
        assert!(!is_isomorphic(&b, &chain4));
    }

    #[test]
    fn found_isomorphisms_preserve_every_operation() {
        let v = make_poset(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap();
        let lambda = make_poset(&["x", "y", "z"], &[("y", "x"), ("z", "x")]).unwrap();
        let from_upsets = up(v.clone());
        let from_order = FiniteHeytingAlgebra::from_lattice_order(&from_upsets.order_poset().unwrap()).unwrap();
        let phi = find_isomorphism(&from_upsets, &from_order, &[]).unwrap();
        for x in from_upsets.elements() {
            for y in from_upsets.elements() {
                assert_eq!(phi[from_upsets.meet(x, y)], from_order.meet(phi[x], phi[y]));
                assert_eq!(phi[from_upsets.join(x, y)], from_order.join(phi[x], phi[y]));
                assert_eq!(phi[from_upsets.implies(x, y)], from_order.implies(phi[x], phi[y]));
            }
        }
        assert!(!is_isomorphic(&from_upsets, &up(lambda)));
    }
}
