//! Finite partially ordered sets, subsets of their carriers, and maps between them.
//!
//! Elements are dense indices `0..n` with user labels kept on the side. A
//! [`Subset`] is a bit pattern over those indices, so carriers are limited to
//! [`MAX_ELEMENTS`] points. A finite poset doubles as a finite Esakia space
//! (the topology is discrete), which is why nothing here mentions topology.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest carrier a [`FinitePoset`] may have.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("covers force `{0}` <= `{1}` and `{1}` <= `{0}`")]
    AntisymmetryViolation(String, String),
    #[error("relation is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("relation is not transitive at `{0}` <= `{1}` <= `{2}`")]
    NotTransitive(String, String, String),
    #[error("a poset may have at most {MAX_ELEMENTS} elements, got {0}")]
    TooManyElements(usize),
    #[error("map assigns {got} images but its domain has {expected} elements")]
    MapArity { expected: usize, got: usize },
    #[error("map sends element {0} outside the codomain")]
    ImageOutOfRange(usize),
    #[error("maps do not compose: codomain and domain differ")]
    NotComposable,
}

/// A subset of a poset carrier, stored as its characteristic bit pattern.
///
/// The derived `Ord` is the canonical order: ascending bit pattern.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// All of `0..n`.
    pub fn full(n: usize) -> Subset {
        if n >= 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Subset {
        Subset(1u64 << x)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(items: I) -> Subset {
        items.into_iter().fold(Subset::EMPTY, |s, x| s.with(x))
    }

    pub fn contains(self, x: usize) -> bool {
        x < 64 && (self.0 >> x) & 1 == 1
    }

    pub fn with(self, x: usize) -> Subset {
        Subset(self.0 | (1u64 << x))
    }

    pub fn without(self, x: usize) -> Subset {
        Subset(self.0 & !(1u64 << x))
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct SubsetIter(u64);

impl Iterator for SubsetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x)
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::from_indices(iter)
    }
}

/// A finite partial order with the full relation materialized.
///
/// `up[x]` is the principal upset of `x` and `down[x]` the principal downset,
/// both as bit patterns; `x <= y` iff bit `y` of `up[x]` is set.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    labels: Vec<String>,
    up: Vec<Subset>,
    down: Vec<Subset>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinitePoset").field("elements", &self.labels).field("covers", &self.cover_labels()).finish()
    }
}

/// Builds a poset from element identifiers and cover pairs `(lower, upper)`.
///
/// The order is the reflexive-transitive closure of the covers.
pub fn make_poset<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<FinitePoset, PosetError> {
    let labels: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.as_str(), i).is_some() {
            return Err(PosetError::DuplicateElement(l.clone()));
        }
    }
    let mut pairs = Vec::with_capacity(covers.len());
    for (a, b) in covers {
        let lookup =
            |s: &S| index.get(s.as_ref()).copied().ok_or_else(|| PosetError::UnknownElement(s.as_ref().to_string()));
        pairs.push((lookup(a)?, lookup(b)?));
    }
    FinitePoset::from_covers(labels, &pairs)
}

impl FinitePoset {
    /// The empty poset.
    pub fn empty() -> FinitePoset {
        FinitePoset { labels: Vec::new(), up: Vec::new(), down: Vec::new() }
    }

    /// Antichain on `labels`.
    pub fn antichain<S: AsRef<str>>(labels: &[S]) -> Result<FinitePoset, PosetError> {
        make_poset(labels, &[])
    }

    /// Chain `labels[0] < labels[1] < ...`.
    pub fn chain<S: AsRef<str>>(labels: &[S]) -> Result<FinitePoset, PosetError> {
        let covers: Vec<(&str, &str)> = labels.windows(2).map(|w| (w[0].as_ref(), w[1].as_ref())).collect();
        let labels: Vec<&str> = labels.iter().map(|s| s.as_ref()).collect();
        make_poset(&labels, &covers)
    }

    /// Closure of index covers; labels must already be distinct.
    pub fn from_covers(labels: Vec<String>, covers: &[(usize, usize)]) -> Result<FinitePoset, PosetError> {
        let n = labels.len();
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooManyElements(n));
        }
        let mut up: Vec<Subset> = (0..n).map(Subset::singleton).collect();
        for &(a, b) in covers {
            if a >= n {
                return Err(PosetError::IndexOutOfRange(a));
            }
            if b >= n {
                return Err(PosetError::IndexOutOfRange(b));
            }
            up[a] = up[a].with(b);
        }
        // Warshall on bit rows.
        for k in 0..n {
            for i in 0..n {
                if up[i].contains(k) {
                    up[i] = up[i].union(up[k]);
                }
            }
        }
        for i in 0..n {
            for j in up[i].iter() {
                if j != i && up[j].contains(i) {
                    return Err(PosetError::AntisymmetryViolation(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(Self::from_up_rows(labels, up))
    }

    /// Builds a poset from a full relation, checking all three order axioms.
    pub fn from_relation<F>(labels: Vec<String>, leq: F) -> Result<FinitePoset, PosetError>
    where
        F: Fn(usize, usize) -> bool,
    {
        let n = labels.len();
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooManyElements(n));
        }
        let up: Vec<Subset> = (0..n).map(|i| (0..n).filter(|&j| leq(i, j)).collect()).collect();
        for i in 0..n {
            if !up[i].contains(i) {
                return Err(PosetError::NotReflexive(labels[i].clone()));
            }
            for j in up[i].iter() {
                if j != i && up[j].contains(i) {
                    return Err(PosetError::AntisymmetryViolation(labels[i].clone(), labels[j].clone()));
                }
                if !up[j].is_subset_of(up[i]) {
                    let k = up[j].difference(up[i]).iter().next().unwrap_or(j);
                    return Err(PosetError::NotTransitive(labels[i].clone(), labels[j].clone(), labels[k].clone()));
                }
            }
        }
        Ok(Self::from_up_rows(labels, up))
    }

    fn from_up_rows(labels: Vec<String>, up: Vec<Subset>) -> FinitePoset {
        let n = labels.len();
        let down = (0..n).map(|j| (0..n).filter(|&i| up[i].contains(j)).collect()).collect();
        FinitePoset { labels, up, down }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, PosetError> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| PosetError::UnknownElement(label.to_string()))
    }

    pub fn carrier(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// `↑x` for an index already known to be in range.
    pub fn up(&self, x: usize) -> Subset {
        self.up[x]
    }

    /// `↓x` for an index already known to be in range.
    pub fn down(&self, x: usize) -> Subset {
        self.down[x]
    }

    /// `{x' | x <= x'}`, the smallest upset containing `x`.
    pub fn principal_upset(&self, x: usize) -> Result<Subset, PosetError> {
        self.up.get(x).copied().ok_or(PosetError::IndexOutOfRange(x))
    }

    pub fn principal_downset(&self, x: usize) -> Result<Subset, PosetError> {
        self.down.get(x).copied().ok_or(PosetError::IndexOutOfRange(x))
    }

    pub fn is_upset(&self, s: Subset) -> bool {
        s.iter().all(|x| self.up[x].is_subset_of(s))
    }

    pub fn is_downset(&self, s: Subset) -> bool {
        s.iter().all(|x| self.down[x].is_subset_of(s))
    }

    /// `⋃_{x∈s} ↑x`
    pub fn upward_closure(&self, s: Subset) -> Subset {
        s.iter().fold(Subset::EMPTY, |acc, x| acc.union(self.up[x]))
    }

    /// Largest upset contained in `s`.
    pub fn upset_interior(&self, s: Subset) -> Subset {
        (0..self.len()).filter(|&x| self.up[x].is_subset_of(s)).collect()
    }

    /// Every upset, sorted by bit pattern.
    pub fn all_upsets(&self) -> Vec<Subset> {
        // Elements with fewer points above them come first, so when an element
        // is considered everything strictly above it has already been decided.
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| (self.up[x].len(), x));
        let mut out = Vec::new();
        self.extend_upsets(&order, 0, Subset::EMPTY, &mut out);
        out.sort_unstable();
        out
    }

    fn extend_upsets(&self, order: &[usize], k: usize, current: Subset, out: &mut Vec<Subset>) {
        if k == order.len() {
            out.push(current);
            return;
        }
        let x = order[k];
        self.extend_upsets(order, k + 1, current, out);
        if self.up[x].without(x).is_subset_of(current) {
            self.extend_upsets(order, k + 1, current.with(x), out);
        }
    }

    /// Cover pairs `(x, y)` with `x < y` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in self.up[x].without(x).iter() {
                let between = self.up[x].intersection(self.down[y]).without(x).without(y);
                if between.is_empty() {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn cover_labels(&self) -> Vec<(&str, &str)> {
        self.covers().into_iter().map(|(a, b)| (self.label(a), self.label(b))).collect()
    }

    pub fn minimal_elements(&self) -> Subset {
        (0..self.len()).filter(|&x| self.down[x] == Subset::singleton(x)).collect()
    }

    pub fn maximal_elements(&self) -> Subset {
        (0..self.len()).filter(|&x| self.up[x] == Subset::singleton(x)).collect()
    }

    /// The induced subposet on `s`, with the map from new indices to old ones.
    pub fn induced(&self, s: Subset) -> (FinitePoset, Vec<usize>) {
        let keep: Vec<usize> = s.iter().filter(|&x| x < self.len()).collect();
        let labels = keep.iter().map(|&x| self.labels[x].clone()).collect();
        let sub = FinitePoset::from_relation(labels, |i, j| self.leq(keep[i], keep[j]))
            .expect("restriction of a partial order is a partial order");
        (sub, keep)
    }

    /// `{a,b}` in this poset's labels.
    pub fn format_subset(&self, s: Subset) -> String {
        let items: Vec<&str> = s.iter().map(|x| self.label(x)).collect();
        format!("{{{}}}", items.join(","))
    }

    /// Structural equality of the order relation, ignoring labels.
    pub fn same_order(&self, other: &FinitePoset) -> bool {
        self.up == other.up
    }
}

/// A total function between poset carriers.
#[derive(Clone)]
pub struct PosetMap {
    domain: Arc<FinitePoset>,
    codomain: Arc<FinitePoset>,
    images: Vec<usize>,
}

impl fmt::Debug for PosetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<(&str, &str)> =
            (0..self.domain.len()).map(|x| (self.domain.label(x), self.codomain.label(self.images[x]))).collect();
        f.debug_struct("PosetMap").field("assignment", &pairs).finish()
    }
}

impl PartialEq for PosetMap {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
            && (Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain)
            && (Arc::ptr_eq(&self.codomain, &other.codomain) || *self.codomain == *other.codomain)
    }
}

impl PosetMap {
    pub fn new(
        domain: Arc<FinitePoset>,
        codomain: Arc<FinitePoset>,
        images: Vec<usize>,
    ) -> Result<PosetMap, PosetError> {
        if images.len() != domain.len() {
            return Err(PosetError::MapArity { expected: domain.len(), got: images.len() });
        }
        if let Some(x) = images.iter().position(|&y| y >= codomain.len()) {
            return Err(PosetError::ImageOutOfRange(x));
        }
        Ok(PosetMap { domain, codomain, images })
    }

    pub fn identity(p: Arc<FinitePoset>) -> PosetMap {
        let images = (0..p.len()).collect();
        PosetMap { domain: p.clone(), codomain: p, images }
    }

    pub fn constant(domain: Arc<FinitePoset>, codomain: Arc<FinitePoset>, y: usize) -> Result<PosetMap, PosetError> {
        let images = vec![y; domain.len()];
        PosetMap::new(domain, codomain, images)
    }

    pub fn domain(&self) -> &Arc<FinitePoset> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FinitePoset> {
        &self.codomain
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ first`
    pub fn after(&self, first: &PosetMap) -> Result<PosetMap, PosetError> {
        if !Arc::ptr_eq(&first.codomain, &self.domain) && *first.codomain != *self.domain {
            return Err(PosetError::NotComposable);
        }
        let images = first.images.iter().map(|&y| self.images[y]).collect();
        Ok(PosetMap { domain: first.domain.clone(), codomain: self.codomain.clone(), images })
    }

    /// `f_!(U) = {f(x) | x ∈ U}`
    pub fn direct_image(&self, u: Subset) -> Subset {
        u.iter().map(|x| self.images[x]).collect()
    }

    /// `f^*(V) = {x | f(x) ∈ V}`
    pub fn inverse_image(&self, v: Subset) -> Subset {
        (0..self.domain.len()).filter(|&x| v.contains(self.images[x])).collect()
    }

    pub fn fiber(&self, y: usize) -> Subset {
        self.inverse_image(Subset::singleton(y))
    }

    /// First pair `x1 <= x2` whose images are not ordered.
    pub fn monotonicity_violation(&self) -> Option<(usize, usize)> {
        let d = &self.domain;
        (0..d.len()).find_map(|x1| {
            d.up(x1).iter().find(|&x2| !self.codomain.leq(self.images[x1], self.images[x2])).map(|x2| (x1, x2))
        })
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    /// First `(x, y)` with `y >= f(x)` but no `x' >= x` mapping to `y`.
    pub fn back_condition_violation(&self) -> Option<(usize, usize)> {
        (0..self.domain.len()).find_map(|x| {
            let reached = self.direct_image(self.domain.up(x));
            self.codomain.up(self.images[x]).difference(reached).iter().next().map(|y| (x, y))
        })
    }

    pub fn satisfies_back_condition(&self) -> bool {
        self.back_condition_violation().is_none()
    }

    pub fn is_p_morphism(&self) -> bool {
        self.is_monotone() && self.satisfies_back_condition()
    }

    /// First `(x, x1, x2)` with `x <= x1`, `x <= x2`, `x1 != x2` and `f(x1) = f(x2)`.
    pub fn strictness_violation(&self) -> Option<(usize, usize, usize)> {
        let d = &self.domain;
        for x in 0..d.len() {
            let above: Vec<usize> = d.up(x).iter().collect();
            for (i, &x1) in above.iter().enumerate() {
                if let Some(&x2) = above[i + 1..].iter().find(|&&x2| self.images[x2] == self.images[x1]) {
                    return Some((x, x1, x2));
                }
            }
        }
        None
    }

    /// A p-morphism whose back-condition witness is unique, i.e. `f`
    /// restricted to each `↑x` is a bijection onto `↑f(x)`.
    pub fn is_strict_p_morphism(&self) -> bool {
        self.is_p_morphism() && self.strictness_violation().is_none()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = Subset::EMPTY;
        self.images.iter().all(|&y| {
            let fresh = !seen.contains(y);
            seen = seen.with(y);
            fresh
        })
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.len() == self.codomain.len() && self.is_injective()
    }

    /// Bijective, monotone, and order-reflecting.
    pub fn is_order_isomorphism(&self) -> bool {
        if !self.is_bijective() {
            return false;
        }
        let n = self.domain.len();
        (0..n).all(|a| (0..n).all(|b| self.domain.leq(a, b) == self.codomain.leq(self.images[a], self.images[b])))
    }

    pub fn format_assignment(&self) -> Vec<(String, String)> {
        (0..self.domain.len())
            .map(|x| (self.domain.label(x).to_string(), self.codomain.label(self.images[x]).to_string()))
            .collect()
    }
}
