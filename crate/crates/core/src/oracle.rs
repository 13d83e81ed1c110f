//! Exhaustive generators used by the verification suites.
//!
//! Every generator is deterministic: the same arguments give the same
//! sequence. Enumeration is over labelled structures, never up to
//! isomorphism.

use std::sync::Arc;

use crate::heyting::{FiniteHeytingAlgebra, HeytingHom};
use crate::poset::{FinitePoset, PosetMap, Subset};
use crate::presheaf::{Presheaf, PresheafError, PresheafMorphism};

/// Every partial order on `{0, …, n-1}`, each exactly once.
///
/// A poset on `n` points is its restriction to the first `n-1` points
/// together with the strict downset `D` and strict upset `U` of the last
/// point; `D` and `U` range over disjoint down/upsets with `D ≤ U` pointwise.
pub fn all_labeled_posets(n: usize) -> impl Iterator<Item = FinitePoset> {
    labeled_posets(n).into_iter()
}

fn labeled_posets(n: usize) -> Vec<FinitePoset> {
    if n == 0 {
        return vec![FinitePoset::empty()];
    }
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut out = Vec::new();
    for q in labeled_posets(n - 1) {
        let ups = q.all_upsets();
        let full = q.carrier();
        let downs: Vec<Subset> = ups.iter().map(|&u| full.difference(u)).collect();
        for &d in &downs {
            for &u in &ups {
                if !d.intersection(u).is_empty() {
                    continue;
                }
                if !d.iter().all(|x| u.is_subset_of(q.up(x))) {
                    continue;
                }
                let last = n - 1;
                let p = FinitePoset::from_relation(labels.clone(), |a, b| {
                    if a == b {
                        true
                    } else if a == last {
                        u.contains(b)
                    } else if b == last {
                        d.contains(a)
                    } else {
                        q.leq(a, b)
                    }
                })
                .expect("one-point extension is a partial order");
                out.push(p);
            }
        }
    }
    out
}

/// All labelled posets with at most `max` points, smallest first.
pub fn all_posets_up_to(max: usize) -> Vec<Arc<FinitePoset>> {
    (0..=max).flat_map(all_labeled_posets).map(Arc::new).collect()
}

/// All `|Q|^|P|` assignments, first coordinate slowest.
pub fn all_maps(p: &Arc<FinitePoset>, q: &Arc<FinitePoset>) -> impl Iterator<Item = PosetMap> {
    let (n, m) = (p.len(), q.len());
    let total = if n == 0 {
        1
    } else if m == 0 {
        0
    } else {
        m.pow(n as u32)
    };
    let (p, q) = (p.clone(), q.clone());
    (0..total).map(move |mut k| {
        let mut images = vec![0; n];
        for slot in images.iter_mut().rev() {
            *slot = k % m;
            k /= m;
        }
        PosetMap::new(p.clone(), q.clone(), images).expect("images in range")
    })
}

/// Order-preserving maps, in the same order as [`all_maps`].
pub fn all_monotone_maps(p: &Arc<FinitePoset>, q: &Arc<FinitePoset>) -> Vec<PosetMap> {
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(p.len());
    fn go(p: &Arc<FinitePoset>, q: &Arc<FinitePoset>, images: &mut Vec<usize>, out: &mut Vec<PosetMap>) {
        let i = images.len();
        if i == p.len() {
            out.push(PosetMap::new(p.clone(), q.clone(), images.clone()).expect("images in range"));
            return;
        }
        for y in 0..q.len() {
            let ok = (0..i).all(|k| (!p.leq(k, i) || q.leq(images[k], y)) && (!p.leq(i, k) || q.leq(y, images[k])));
            if ok {
                images.push(y);
                go(p, q, images, out);
                images.pop();
            }
        }
    }
    go(p, q, &mut images, &mut out);
    out
}

pub fn all_p_morphisms(p: &Arc<FinitePoset>, q: &Arc<FinitePoset>) -> Vec<PosetMap> {
    all_monotone_maps(p, q).into_iter().filter(PosetMap::satisfies_back_condition).collect()
}

pub fn all_strict_p_morphisms(p: &Arc<FinitePoset>, q: &Arc<FinitePoset>) -> Vec<PosetMap> {
    all_p_morphisms(p, q).into_iter().filter(PosetMap::is_strict_p_morphism).collect()
}

/// Maps preserving bottom, top, meet, join and implication.
pub fn all_homomorphisms(a: &Arc<FiniteHeytingAlgebra>, b: &Arc<FiniteHeytingAlgebra>) -> Vec<HeytingHom> {
    homomorphisms(a, b, true)
}

/// Maps preserving bottom, top, meet and join.
pub fn all_lattice_homomorphisms(a: &Arc<FiniteHeytingAlgebra>, b: &Arc<FiniteHeytingAlgebra>) -> Vec<HeytingHom> {
    homomorphisms(a, b, false)
}

fn homomorphisms(a: &Arc<FiniteHeytingAlgebra>, b: &Arc<FiniteHeytingAlgebra>, heyting: bool) -> Vec<HeytingHom> {
    const UNSET: usize = usize::MAX;
    let mut images = vec![UNSET; a.len()];
    let mut out = Vec::new();

    // Checks every operation among assigned arguments whose result is assigned.
    fn consistent(a: &FiniteHeytingAlgebra, b: &FiniteHeytingAlgebra, images: &[usize], heyting: bool) -> bool {
        let agrees = |r: usize, v: usize| images[r] == UNSET || images[r] == v;
        for x in a.elements().filter(|&x| images[x] != UNSET) {
            for y in a.elements().filter(|&y| images[y] != UNSET) {
                let (hx, hy) = (images[x], images[y]);
                if !agrees(a.meet(x, y), b.meet(hx, hy))
                    || !agrees(a.join(x, y), b.join(hx, hy))
                    || (heyting && !agrees(a.implies(x, y), b.implies(hx, hy)))
                {
                    return false;
                }
            }
        }
        true
    }

    fn go(
        i: usize,
        a: &Arc<FiniteHeytingAlgebra>,
        b: &Arc<FiniteHeytingAlgebra>,
        heyting: bool,
        images: &mut Vec<usize>,
        out: &mut Vec<HeytingHom>,
    ) {
        if i == a.len() {
            if images.iter().all(|&v| v != UNSET) {
                out.push(HeytingHom::new(a.clone(), b.clone(), images.clone()).expect("images in range"));
            }
            return;
        }
        if images[i] != UNSET {
            go(i + 1, a, b, heyting, images, out);
            return;
        }
        for v in b.elements() {
            images[i] = v;
            if consistent(a, b, images, heyting) {
                go(i + 1, a, b, heyting, images, out);
            }
        }
        images[i] = UNSET;
    }

    if b.is_empty() {
        return out;
    }
    images[a.bottom()] = b.bottom();
    if images[a.top()] != UNSET && images[a.top()] != b.top() {
        // One-element domain into a nondegenerate codomain.
        return out;
    }
    images[a.top()] = b.top();
    if consistent(a, b, &images, heyting) {
        go(0, a, b, heyting, &mut images, &mut out);
    }
    out
}

/// Fiber sizes in `0..=max_fiber` (first point slowest), then every
/// functorial choice of cover restrictions.
pub fn all_presheaves(x: &Arc<FinitePoset>, max_fiber: usize) -> Vec<Presheaf> {
    let n = x.len();
    let covers = x.covers();
    let mut out = Vec::new();
    let radix = max_fiber + 1;
    for code in 0..radix.pow(n as u32) {
        let mut sizes = vec![0; n];
        let mut k = code;
        for s in sizes.iter_mut().rev() {
            *s = k % radix;
            k /= radix;
        }
        // One function per cover; |F(y)|^|F(x)| choices each.
        let counts: Vec<usize> =
            covers.iter().map(|&(a, b)| if sizes[a] == 0 { 1 } else { sizes[b].pow(sizes[a] as u32) }).collect();
        let combos: usize = counts.iter().product();
        for mut c in 0..combos {
            let mut given = Vec::with_capacity(covers.len());
            for (&(a, b), &cnt) in covers.iter().zip(&counts) {
                let mut f = c % cnt;
                c /= cnt;
                let mut map = vec![0; sizes[a]];
                for slot in map.iter_mut().rev() {
                    *slot = f % sizes[b];
                    f /= sizes[b];
                }
                given.push(((a, b), map));
            }
            match Presheaf::from_sizes(x.clone(), &sizes, &given) {
                Ok(p) => out.push(p),
                Err(PresheafError::InvalidPresheaf(_)) => {}
                Err(e) => panic!("unexpected presheaf error: {e}"),
            }
        }
    }
    out
}

/// Every natural transformation `f → g`.
pub fn all_presheaf_morphisms(f: &Presheaf, g: &Presheaf) -> Vec<PresheafMorphism> {
    let n = f.base().len();
    let mut out = Vec::new();
    let mut components: Vec<Vec<usize>> = (0..n).map(|x| vec![0; f.fiber_size(x)]).collect();
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..f.fiber_size(x)).map(move |i| (x, i))).collect();
    if slots.iter().any(|&(x, _)| g.fiber_size(x) == 0) {
        return out;
    }
    let counts: Vec<usize> = slots.iter().map(|&(x, _)| g.fiber_size(x)).collect();
    let total: usize = counts.iter().product();
    for mut c in 0..total {
        for (&(x, i), &cnt) in slots.iter().zip(&counts).rev() {
            components[x][i] = c % cnt;
            c /= cnt;
        }
        if let Ok(m) = PresheafMorphism::new(f.clone(), g.clone(), components.clone()) {
            out.push(m);
        }
    }
    out
}
