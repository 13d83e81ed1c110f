//! Exhaustive verification suites.
//!
//! Each suite enumerates every instance inside its size caps and checks one
//! or more statements on each. Instances are processed in parallel, but
//! results are collected in enumeration order so reports are reproducible
//! byte for byte.

use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::duality::{counit_iso, dual_of_homomorphism, dual_of_pmorphism_with, unit_iso_with};
use crate::etale::{certified_by_cover, etale_axiom_holds, failure_witness, local_witness, HAlgebra};
use crate::heyting::{find_isomorphism, FiniteHeytingAlgebra};
use crate::limits::{
    bundle_product_with_legs, dl_pushout, etale_coproduct, maps_over, poset_pullback, terminal_bundle,
};
use crate::oracle::{
    all_homomorphisms, all_lattice_homomorphisms, all_monotone_maps, all_p_morphisms, all_posets_up_to,
    all_presheaf_morphisms, all_presheaves,
};
use crate::poset::{FinitePoset, PosetMap};
use crate::presheaf::{
    find_iso_over, grothendieck, round_trip_presheaf, round_trip_total, Bundle, Presheaf, SubfunctorAlgebra,
};

pub const SUITES: &[&str] = &["strict-etale", "duality-roundtrip", "equivalence", "colimits", "heyting-laws"];

/// Failures kept per theorem; the count is always exact.
const MAX_RECORDED_FAILURES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Largest base poset (the codomain side).
    pub max_base: usize,
    /// Largest total poset, or the poset bound for single-poset suites.
    pub max_total: usize,
    pub max_fiber: usize,
    /// Seed for down-sampling; only used together with `sample`.
    pub seed: u64,
    /// Check at most this many instances per theorem, chosen at random.
    pub sample: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { max_base: 3, max_total: 4, max_fiber: 2, seed: 0, sample: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub name: &'static str,
    pub statement: &'static str,
    pub instances: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl TheoremReport {
    pub fn ok(&self) -> bool {
        self.passed == self.instances
    }

    fn from_results(name: &'static str, statement: &'static str, results: Vec<Option<String>>) -> Self {
        let instances = results.len();
        let failures: Vec<String> = results.into_iter().flatten().collect();
        let passed = instances - failures.len();
        TheoremReport {
            name,
            statement,
            instances,
            passed,
            failures: failures.into_iter().take(MAX_RECORDED_FAILURES).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub config: SuiteConfig,
    pub theorems: Vec<TheoremReport>,
    /// Extra counts that are not pass/fail, such as how many maps were strict.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.theorems.iter().all(TheoremReport::ok)
    }

    pub fn theorem(&self, name: &str) -> Option<&TheoremReport> {
        self.theorems.iter().find(|t| t.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        write!(
            f,
            "suite {} (max-base {}, max-total {}, max-fiber {}",
            self.suite, c.max_base, c.max_total, c.max_fiber
        )?;
        if let Some(k) = c.sample {
            write!(f, ", sample {k}, seed {}", c.seed)?;
        }
        writeln!(f, ")")?;
        for t in &self.theorems {
            let verdict = if t.ok() { "ok" } else { "FAILED" };
            writeln!(f, "  {}: {}/{} {} -- {}", t.name, t.passed, t.instances, verdict, t.statement)?;
            for w in &t.failures {
                writeln!(f, "WITNESS: suite={} theorem={} {}", self.suite, t.name, w)?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        writeln!(f, "  result: {}", if self.ok() { "PASS" } else { "FAIL" })
    }
}

/// Runs a named suite, or every suite for `"all"`.
pub fn run_suite(name: &str, config: &SuiteConfig) -> Option<Vec<SuiteReport>> {
    let one = |n: &str| -> Option<SuiteReport> {
        Some(match n {
            "strict-etale" => strict_etale(config),
            "duality-roundtrip" => duality_roundtrip(config),
            "equivalence" => equivalence(config),
            "colimits" => colimits(config),
            "heyting-laws" => heyting_laws(config),
            _ => return None,
        })
    };
    if name == "all" {
        Some(SUITES.iter().map(|n| one(n).expect("known suite")).collect())
    } else {
        one(name).map(|r| vec![r])
    }
}

/// Keeps every instance, or a seeded random subset in enumeration order.
fn select<T>(items: Vec<T>, config: &SuiteConfig) -> Vec<T> {
    match config.sample {
        Some(k) if k < items.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut keep = sample(&mut rng, items.len(), k).into_vec();
            keep.sort_unstable();
            let mut flags = vec![false; items.len()];
            for i in keep {
                flags[i] = true;
            }
            items.into_iter().zip(flags).filter_map(|(x, f)| f.then_some(x)).collect()
        }
        _ => items,
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(what)
}

fn describe_map(f: &PosetMap) -> String {
    format!(
        "domain-covers={:?} codomain-covers={:?} map=[{}]",
        f.domain().cover_labels(),
        f.codomain().cover_labels(),
        f.images().iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    )
}

fn describe_presheaf(f: &Presheaf) -> String {
    let sizes: Vec<usize> = (0..f.base().len()).map(|x| f.fiber_size(x)).collect();
    format!("base-covers={:?} fibers={:?} restrictions={:?}", f.base().cover_labels(), sizes, f.cover_restrictions())
}

struct UpCache {
    posets: Vec<Arc<FinitePoset>>,
    ups: Vec<Arc<FiniteHeytingAlgebra>>,
}

impl UpCache {
    fn new(max: usize) -> UpCache {
        let posets = all_posets_up_to(max);
        let ups = posets
            .par_iter()
            .map(|p| Arc::new(FiniteHeytingAlgebra::upset_algebra(p.clone()).expect("small poset")))
            .collect();
        UpCache { posets, ups }
    }

    fn sized(&self, max: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.posets.len()).filter(move |&i| self.posets[i].len() <= max)
    }
}

/// Strict p-morphisms are exactly the maps whose dual satisfies the étale axiom.
pub fn strict_etale(config: &SuiteConfig) -> SuiteReport {
    let cache = UpCache::new(config.max_base.max(config.max_total));
    let pairs: Vec<(usize, usize)> =
        cache.sized(config.max_total).flat_map(|d| cache.sized(config.max_base).map(move |c| (d, c))).collect();
    let maps: Vec<(usize, usize, PosetMap)> = pairs
        .par_iter()
        .flat_map_iter(|&(d, c)| {
            all_p_morphisms(&cache.posets[d], &cache.posets[c]).into_iter().map(move |f| (d, c, f))
        })
        .collect();
    let maps = select(maps, config);

    struct Outcome {
        strict: bool,
        agree: Option<String>,
        witness: Option<Option<String>>,
        cover: Option<Option<String>>,
    }
    let outcomes: Vec<Outcome> = maps
        .par_iter()
        .map(|(d, c, f)| {
            let alg = HAlgebra::from_pmorphism_with(f, cache.ups[*c].clone(), cache.ups[*d].clone())
                .expect("p-morphisms dualize");
            let strict = f.is_strict_p_morphism();
            let holds = etale_axiom_holds(&alg);
            let agree = check(strict == holds, || {
                let w = failure_witness(&alg).map(|a| alg.carrier().label(a).to_string()).unwrap_or_default();
                format!("{} strict={strict} axiom={holds} failure-at={w}", describe_map(f))
            });
            let (witness, cover) = if strict {
                let x = f.domain();
                let carrier = alg.carrier();
                let ups = carrier.upsets().expect("upset algebra");
                let bad_local = ups.masks().iter().find_map(|&u| {
                    (0..x.len()).find_map(|y| {
                        let w = local_witness(f, y, u);
                        let upy = x.up(y);
                        let ok =
                            f.codomain().is_upset(w) && upy.intersection(u) == upy.intersection(f.inverse_image(w));
                        (!ok).then(|| format!("{} y={} U={}", describe_map(f), x.label(y), x.format_subset(u)))
                    })
                });
                let principal: Vec<usize> =
                    (0..x.len()).map(|y| ups.index_of(x.up(y)).expect("principal upset")).collect();
                let bad_cover = carrier
                    .elements()
                    .find(|&a| !certified_by_cover(&alg, a, &principal))
                    .map(|a| format!("{} element={}", describe_map(f), carrier.label(a)));
                (Some(bad_local), Some(bad_cover))
            } else {
                (None, None)
            };
            Outcome { strict, agree, witness, cover }
        })
        .collect();

    let strict_count = outcomes.iter().filter(|o| o.strict).count();
    let total = outcomes.len();
    let identity: Vec<Option<String>> = cache
        .sized(config.max_base)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| {
            let alg = HAlgebra::identity(cache.ups[i].clone());
            check(etale_axiom_holds(&alg), || format!("base-covers={:?}", cache.posets[i].cover_labels()))
        })
        .collect();
    let mut agree = Vec::with_capacity(total);
    let mut local = Vec::new();
    let mut cover = Vec::new();
    for o in outcomes {
        agree.push(o.agree);
        if let Some(w) = o.witness {
            local.push(w);
        }
        if let Some(c) = o.cover {
            cover.push(c);
        }
    }
    SuiteReport {
        suite: "strict-etale",
        config: config.clone(),
        theorems: vec![
            TheoremReport::from_results(
                "identity-validates-axiom",
                "the identity H-algebra on Up(X) satisfies the etale axiom",
                identity,
            ),
            TheoremReport::from_results(
                "strict-iff-etale-axiom",
                "a p-morphism is strict iff its dual satisfies the etale axiom",
                agree,
            ),
            TheoremReport::from_results(
                "strict-local-witness",
                "for strict f, every y and upset U: up(y) & U = up(y) & f^-1(f(up(y) & U))",
                local,
            ),
            TheoremReport::from_results(
                "principal-cover-certificate",
                "for strict f, the principal upsets form a cover certifying the axiom at every element",
                cover,
            ),
        ],
        notes: vec![format!("{strict_count} of {total} p-morphisms are strict")],
    }
}

/// Units and counits are isomorphisms, and duality is functorial.
pub fn duality_roundtrip(config: &SuiteConfig) -> SuiteReport {
    let cache = UpCache::new(config.max_total.max(config.max_base));
    let posets: Vec<usize> = select(cache.sized(config.max_total).collect(), config);
    let units: Vec<Option<String>> = posets
        .par_iter()
        .map(|&i| {
            let x = &cache.posets[i];
            match unit_iso_with(x.clone(), &cache.ups[i]) {
                Ok(u) => check(u.is_order_isomorphism(), || format!("covers={:?}", x.cover_labels())),
                Err(e) => Some(format!("covers={:?} error={e}", x.cover_labels())),
            }
        })
        .collect();
    let counits: Vec<Option<String>> = posets
        .par_iter()
        .map(|&i| {
            let x = &cache.posets[i];
            match counit_iso(cache.ups[i].clone()) {
                Ok(c) => check(c.is_isomorphism(), || format!("covers={:?}", x.cover_labels())),
                Err(e) => Some(format!("covers={:?} error={e}", x.cover_labels())),
            }
        })
        .collect();

    let pairs: Vec<(usize, usize)> =
        cache.sized(config.max_base).flat_map(|d| cache.sized(config.max_base).map(move |c| (d, c))).collect();
    let pairs = select(pairs, config);
    // |p-morphisms X' → X| equals |homomorphisms Up(X) → Up(X')|, and the
    // double dual of each p-morphism agrees with it through the units.
    let counted: Vec<(Option<String>, Vec<Option<String>>)> = pairs
        .par_iter()
        .map(|&(d, c)| {
            let (xd, xc) = (&cache.posets[d], &cache.posets[c]);
            let pms = all_p_morphisms(xd, xc);
            let homs = all_homomorphisms(&cache.ups[c], &cache.ups[d]);
            let count = check(pms.len() == homs.len(), || {
                format!(
                    "domain-covers={:?} codomain-covers={:?} p-morphisms={} homomorphisms={}",
                    xd.cover_labels(),
                    xc.cover_labels(),
                    pms.len(),
                    homs.len()
                )
            });
            let unit_d = unit_iso_with(xd.clone(), &cache.ups[d]).expect("unit");
            let unit_c = unit_iso_with(xc.clone(), &cache.ups[c]).expect("unit");
            let natural = pms
                .iter()
                .map(|f| {
                    let h = dual_of_pmorphism_with(f, cache.ups[c].clone(), cache.ups[d].clone()).expect("dual");
                    let back = dual_of_homomorphism(&h).expect("double dual");
                    let lhs = unit_c.after(f).expect("composable");
                    let rhs = back.after(&unit_d).expect("composable");
                    check(lhs.images() == rhs.images() && back.is_p_morphism(), || describe_map(f))
                })
                .collect();
            (count, natural)
        })
        .collect();
    let mut count = Vec::new();
    let mut natural = Vec::new();
    for (c, n) in counted {
        count.push(c);
        natural.extend(n);
    }
    SuiteReport {
        suite: "duality-roundtrip",
        config: config.clone(),
        theorems: vec![
            TheoremReport::from_results("unit-is-order-isomorphism", "X -> dual(Up(X)) is an order-isomorphism", units),
            TheoremReport::from_results(
                "counit-is-heyting-isomorphism",
                "Up(X) -> Up(dual(Up(X))) is a Heyting isomorphism",
                counits,
            ),
            TheoremReport::from_results(
                "hom-sets-correspond",
                "p-morphisms X' -> X and homomorphisms Up(X) -> Up(X') are equinumerous",
                count,
            ),
            TheoremReport::from_results(
                "double-dual-is-natural",
                "the double dual of every p-morphism commutes with the units",
                natural,
            ),
        ],
        notes: Vec::new(),
    }
}

/// The Heyting laws in Up(X) and the local-agreement lemma.
pub fn heyting_laws(config: &SuiteConfig) -> SuiteReport {
    let cache = UpCache::new(config.max_total);
    let posets: Vec<usize> = select(cache.sized(config.max_total).collect(), config);
    let laws: Vec<Option<String>> = posets
        .par_iter()
        .map(|&i| {
            cache.ups[i]
                .heyting_law_violation()
                .map(|why| format!("covers={:?} law={why}", cache.posets[i].cover_labels()))
        })
        .collect();
    // Independent residual: a ⇒ b is the join of every c with c ∧ a ≤ b.
    let residual: Vec<Option<String>> = posets
        .par_iter()
        .map(|&i| {
            let h = &cache.ups[i];
            let bad = h.elements().find_map(|a| {
                h.elements().find_map(|b| {
                    let best = h.join_all(h.elements().filter(|&c| h.leq(h.meet(c, a), b)));
                    (best != h.implies(a, b)).then(|| format!("a={} b={}", h.label(a), h.label(b)))
                })
            });
            bad.map(|w| format!("covers={:?} {w}", cache.posets[i].cover_labels()))
        })
        .collect();
    let aux_bound = config.max_total.saturating_sub(1);
    let aux: Vec<Option<String>> = posets
        .iter()
        .copied()
        .filter(|&i| cache.posets[i].len() <= aux_bound)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| {
            let h = &cache.ups[i];
            let bad = h.elements().find_map(|x| {
                h.elements().find_map(|y| {
                    h.elements().find_map(|z| {
                        let premise = h.meet(y, x) == h.meet(y, z);
                        (premise && !h.leq(y, h.biconditional(x, z)))
                            .then(|| format!("x={} y={} z={}", h.label(x), h.label(y), h.label(z)))
                    })
                })
            });
            bad.map(|w| format!("covers={:?} {w}", cache.posets[i].cover_labels()))
        })
        .collect();
    SuiteReport {
        suite: "heyting-laws",
        config: config.clone(),
        theorems: vec![
            TheoremReport::from_results(
                "upset-algebra-is-heyting",
                "Up(X) satisfies the lattice, distributive and residuation laws",
                laws,
            ),
            TheoremReport::from_results(
                "implication-is-largest-residual",
                "U => V is the join of all W with W & U <= V",
                residual,
            ),
            TheoremReport::from_results(
                "local-agreement-lemma",
                "y & x = y & z implies y <= (x <=> z), all triples, |X| <= max-total - 1",
                aux,
            ),
        ],
        notes: Vec::new(),
    }
}

/// Presheaves and strict bundles correspond, and subfunctors embed.
pub fn equivalence(config: &SuiteConfig) -> SuiteReport {
    let bases = all_posets_up_to(config.max_base);
    let sheaves: Vec<Presheaf> = bases.iter().flat_map(|x| all_presheaves(x, config.max_fiber)).collect();
    let sheaves = select(sheaves, config);

    #[derive(Default)]
    struct Row {
        strict: Option<String>,
        total: Option<String>,
        presheaf: Option<String>,
        subfunctors: Option<String>,
        m: Vec<Option<String>>,
        embedding: Option<String>,
    }
    let rows: Vec<Row> = sheaves
        .par_iter()
        .map(|f| {
            let tag = describe_presheaf(f);
            let mut row = Row::default();
            let bundle = match grothendieck(f) {
                Ok(b) => b,
                Err(e) => {
                    row.strict = Some(format!("{tag} error={e}"));
                    return row;
                }
            };
            row.strict = check(bundle.projection().is_strict_p_morphism(), || tag.clone());
            row.total = check(round_trip_total(&bundle), || tag.clone());
            row.presheaf = check(round_trip_presheaf(f), || tag.clone());
            let sa = SubfunctorAlgebra::new(f).expect("subfunctor algebra");
            let up = FiniteHeytingAlgebra::upset_algebra(bundle.total().clone()).expect("small total");
            // Both carriers are listed in the same canonical order of total subsets.
            let offsets = f.offsets();
            let same_carrier = sa.subfunctors().iter().map(|s| s.total_subset(&offsets)).eq(up
                .upsets()
                .expect("upset algebra")
                .masks()
                .iter()
                .copied());
            row.subfunctors = check(same_carrier && **sa.algebra() == up, || tag.clone());
            for x in 0..f.base().len() {
                for xi in 0..f.fiber_size(x) {
                    let ok = sa.m_component(x, xi).map(|m| m.is_homomorphism()).unwrap_or(false);
                    row.m.push(check(ok, || format!("{tag} x={} xi={xi}", f.base().label(x))));
                }
            }
            let emb = sa.product_embedding().expect("embedding");
            row.embedding = check(emb.is_injective() && emb.is_homomorphism(), || tag.clone());
            row
        })
        .collect();

    // Naturality on the smaller bases: every presheaf morphism induces a
    // map over X, and the fiber functor takes it back to itself.
    let small: Vec<&Presheaf> = sheaves.iter().filter(|f| f.base().len() <= config.max_base.min(2)).collect();
    let pairs: Vec<(&Presheaf, &Presheaf)> = small
        .iter()
        .flat_map(|&f| small.iter().filter(move |g| Arc::ptr_eq(g.base(), f.base())).map(move |&g| (f, g)))
        .collect();
    let naturality: Vec<Option<String>> = pairs
        .par_iter()
        .flat_map_iter(|&(f, g)| {
            let (bf, bg) = (grothendieck(f).expect("valid"), grothendieck(g).expect("valid"));
            all_presheaf_morphisms(f, g).into_iter().map(move |gamma| {
                let ok = gamma.total_map(&bf, &bg).is_ok_and(|m| {
                    m.is_monotone()
                        && bg.projection().after(&m).is_ok_and(|pm| pm.images() == bf.projection().images())
                        && (0..f.base().len()).all(|x| {
                            // Ψ(γ) restricted to the fiber over x is γ_x.
                            let offs_f = f.offsets();
                            let offs_g = g.offsets();
                            (0..f.fiber_size(x)).all(|i| m.apply(offs_f[x] + i) == offs_g[x] + gamma.component(x)[i])
                        })
                });
                check(ok, || format!("source {} target {}", describe_presheaf(f), describe_presheaf(g)))
            })
        })
        .collect();

    let mut t = [Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for r in rows {
        t[0].push(r.strict);
        t[1].push(r.total);
        t[2].push(r.presheaf);
        t[3].push(r.subfunctors);
        t[4].extend(r.m);
        t[5].push(r.embedding);
    }
    let [strict, total, presheaf, subfunctors, m, embedding] = t;
    SuiteReport {
        suite: "equivalence",
        config: config.clone(),
        theorems: vec![
            TheoremReport::from_results(
                "grothendieck-is-strict",
                "the projection of the Grothendieck total is a strict p-morphism",
                strict,
            ),
            TheoremReport::from_results(
                "bundle-round-trip",
                "the Grothendieck total of the fiber presheaf is isomorphic over X",
                total,
            ),
            TheoremReport::from_results(
                "presheaf-round-trip",
                "the fiber presheaf of the Grothendieck total is isomorphic to F",
                presheaf,
            ),
            TheoremReport::from_results(
                "subfunctors-are-upsets",
                "subfunctors with pointwise operations form exactly Up of the total",
                subfunctors,
            ),
            TheoremReport::from_results("m-is-homomorphism", "every m-component is a Heyting homomorphism", m),
            TheoremReport::from_results(
                "product-embedding-injective",
                "the tupled m-components are an injective homomorphism",
                embedding,
            ),
            TheoremReport::from_results(
                "morphisms-are-natural",
                "every presheaf morphism induces a map over X restricting to its components",
                naturality,
            ),
        ],
        notes: vec![format!("{} presheaves enumerated", sheaves.len())],
    }
}

struct Instance {
    presheaf: Presheaf,
    bundle: Bundle,
    algebra: HAlgebra,
}

/// Products of strict bundles and pushouts of étale algebras agree.
pub fn colimits(config: &SuiteConfig) -> SuiteReport {
    let bases = all_posets_up_to(config.max_base);
    let groups: Vec<Vec<Instance>> = bases
        .par_iter()
        .map(|x| {
            let h = Arc::new(FiniteHeytingAlgebra::upset_algebra(x.clone()).expect("small base"));
            all_presheaves(x, config.max_fiber)
                .into_iter()
                .map(|f| {
                    let bundle = grothendieck(&f).expect("valid presheaf");
                    let up = Arc::new(FiniteHeytingAlgebra::upset_algebra(bundle.total().clone()).expect("small"));
                    let algebra = HAlgebra::from_pmorphism_with(bundle.projection(), h.clone(), up).expect("dual");
                    Instance { presheaf: f, bundle, algebra }
                })
                .collect()
        })
        .collect();
    let pairs: Vec<(usize, usize, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, insts)| (0..insts.len()).flat_map(move |i| (0..insts.len()).map(move |j| (g, i, j))))
        .collect();
    let pairs = select(pairs, config);

    #[derive(Default)]
    struct Row {
        product: Option<String>,
        coproduct: Option<String>,
        etale: Option<String>,
        pullback_universal: Option<Option<String>>,
        pushout_universal: Option<Option<String>>,
    }
    let rows: Vec<Row> = pairs
        .par_iter()
        .map(|&(g, i, j)| {
            let (a, b) = (&groups[g][i], &groups[g][j]);
            let tag = format!("left {} right {}", describe_presheaf(&a.presheaf), describe_presheaf(&b.presheaf));
            let mut row = Row::default();

            let product = match bundle_product_with_legs(&a.bundle, &b.bundle) {
                Ok(p) => p,
                Err(e) => {
                    row.product = Some(format!("{tag} error={e}"));
                    row.coproduct = Some(format!("{tag} error={e}"));
                    row.etale = Some(format!("{tag} error={e}"));
                    return row;
                }
            };
            let pointwise = a.presheaf.product(&b.presheaf).and_then(|p| grothendieck(&p));
            row.product = check(
                product.bundle.projection().is_strict_p_morphism()
                    && pointwise.is_ok_and(|pw| find_iso_over(&product.bundle, &pw).is_some()),
                || tag.clone(),
            );

            let co = etale_coproduct(&a.algebra, &b.algebra);
            let po = dl_pushout(a.algebra.structure(), b.algebra.structure());
            row.coproduct = match (&co, &po) {
                (Ok(co), Ok(po)) => {
                    let c1 = a.algebra.structure();
                    let c2 = b.algebra.structure();
                    let square = po.left.after(c1).ok() == po.right.after(c2).ok()
                        && co.left.after(c1).ok().map(|m| m.images().to_vec())
                            == Some(co.algebra.structure().images().to_vec())
                        && co.right.after(c2).ok().map(|m| m.images().to_vec())
                            == Some(co.algebra.structure().images().to_vec());
                    let fixed: Vec<(usize, usize)> = a
                        .algebra
                        .carrier()
                        .elements()
                        .map(|x| (co.left.apply(x), po.left.apply(x)))
                        .chain(b.algebra.carrier().elements().map(|y| (co.right.apply(y), po.right.apply(y))))
                        .collect();
                    let phi = find_isomorphism(co.algebra.carrier(), &po.apex, &fixed);
                    let iso = phi.is_some();
                    // Checked directly on the images of the join-irreducibles
                    // of both sides, independently of the order argument.
                    let generators: Vec<(usize, usize)> = a
                        .algebra
                        .carrier()
                        .join_irreducibles()
                        .iter()
                        .map(|&x| (co.left.apply(x), po.left.apply(x)))
                        .chain(
                            b.algebra
                                .carrier()
                                .join_irreducibles()
                                .iter()
                                .map(|&y| (co.right.apply(y), po.right.apply(y))),
                        )
                        .collect();
                    let (cc, pa) = (co.algebra.carrier(), &po.apex);
                    let implication = phi.as_ref().is_some_and(|phi| {
                        generators
                            .iter()
                            .all(|&(u, p)| generators.iter().all(|&(v, q)| phi[cc.implies(u, v)] == pa.implies(p, q)))
                    });
                    check(square && iso && implication, || {
                        format!("{tag} square={square} iso={iso} implication={implication}")
                    })
                }
                (Err(e), _) | (_, Err(e)) => Some(format!("{tag} error={e}")),
            };
            row.etale = match &co {
                Ok(co) => check(etale_axiom_holds(&co.algebra), || tag.clone()),
                Err(e) => Some(format!("{tag} error={e}")),
            };

            if a.bundle.total().len() + b.bundle.total().len() <= 4 {
                row.pullback_universal = Some(pullback_universal(&a.bundle, &b.bundle, &tag));
                if let Ok(po) = &po {
                    row.pushout_universal = Some(pushout_universal(&a.algebra, &b.algebra, po, &tag));
                }
            }
            row
        })
        .collect();

    let terminal: Vec<Option<String>> = groups
        .par_iter()
        .flat_map_iter(|insts| {
            insts.iter().map(|inst| {
                let t = terminal_bundle(inst.bundle.base().clone());
                check(maps_over(&inst.bundle, &t).len() == 1, || describe_presheaf(&inst.presheaf))
            })
        })
        .collect();

    let mut product = Vec::new();
    let mut coproduct = Vec::new();
    let mut etale = Vec::new();
    let mut pullback = Vec::new();
    let mut pushout = Vec::new();
    for r in rows {
        product.push(r.product);
        coproduct.push(r.coproduct);
        etale.push(r.etale);
        pullback.extend(r.pullback_universal);
        pushout.extend(r.pushout_universal);
    }
    SuiteReport {
        suite: "colimits",
        config: config.clone(),
        theorems: vec![
            TheoremReport::from_results(
                "terminal-bundle",
                "every strict bundle has exactly one map over X to the identity",
                terminal,
            ),
            TheoremReport::from_results(
                "product-is-pointwise",
                "the pullback product is strict and isomorphic over X to the pointwise presheaf product",
                product,
            ),
            TheoremReport::from_results(
                "coproduct-is-pushout",
                "the etale coproduct is isomorphic to the lattice pushout, legs commuting, implication preserved",
                coproduct,
            ),
            TheoremReport::from_results("coproduct-is-etale", "the etale coproduct satisfies the etale axiom", etale),
            TheoremReport::from_results(
                "pullback-universal",
                "every cone from a poset of size <= 2 factors uniquely through the pullback",
                pullback,
            ),
            TheoremReport::from_results(
                "pushout-universal",
                "every cocone into Up(T), |T| <= 2, factors uniquely through the pushout",
                pushout,
            ),
        ],
        notes: vec![format!("{} ordered pairs of strict bundles", pairs.len())],
    }
}

fn test_objects() -> Vec<Arc<FinitePoset>> {
    all_posets_up_to(2)
}

fn pullback_universal(f1: &Bundle, f2: &Bundle, tag: &str) -> Option<String> {
    let p = poset_pullback(f1.projection(), f2.projection()).ok()?;
    for t in test_objects() {
        let to_left = all_monotone_maps(&t, f1.total());
        let to_right = all_monotone_maps(&t, f2.total());
        let to_apex = all_monotone_maps(&t, &p.apex);
        for u in &to_left {
            for v in &to_right {
                let cone = f1.projection().after(u).ok()?.images() == f2.projection().after(v).ok()?.images();
                if !cone {
                    continue;
                }
                let mediating = to_apex
                    .iter()
                    .filter(|m| {
                        p.left.after(m).is_ok_and(|l| l.images() == u.images())
                            && p.right.after(m).is_ok_and(|r| r.images() == v.images())
                    })
                    .count();
                if mediating != 1 {
                    return Some(format!("{tag} test-covers={:?} mediating={mediating}", t.cover_labels()));
                }
            }
        }
    }
    None
}

fn pushout_universal(a: &HAlgebra, b: &HAlgebra, po: &crate::limits::Pushout, tag: &str) -> Option<String> {
    let (c1, c2) = (a.structure(), b.structure());
    for t in test_objects() {
        let d = Arc::new(FiniteHeytingAlgebra::upset_algebra(t.clone()).expect("small"));
        let from_apex = all_lattice_homomorphisms(&po.apex, &d);
        let from_left = all_lattice_homomorphisms(a.carrier(), &d);
        let from_right = all_lattice_homomorphisms(b.carrier(), &d);
        for u in &from_left {
            for v in &from_right {
                if u.after(c1).ok()?.images() != v.after(c2).ok()?.images() {
                    continue;
                }
                let mediating = from_apex
                    .iter()
                    .filter(|m| {
                        m.after(&po.left).is_ok_and(|l| l.images() == u.images())
                            && m.after(&po.right).is_ok_and(|r| r.images() == v.images())
                    })
                    .count();
                if mediating != 1 {
                    return Some(format!("{tag} test-covers={:?} mediating={mediating}", t.cover_labels()));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SuiteConfig {
        SuiteConfig { max_base: 2, max_total: 3, max_fiber: 1, seed: 0, sample: None }
    }

    #[test]
    fn every_suite_passes_at_small_size() {
        for report in run_suite("all", &tiny()).unwrap() {
            assert!(report.ok(), "{report}");
            assert!(report.theorems.iter().all(|t| t.instances > 0), "{report}");
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", &tiny()).is_none());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite("strict-etale", &tiny()).unwrap();
        let b = run_suite("strict-etale", &tiny()).unwrap();
        assert_eq!(format!("{}", a[0]), format!("{}", b[0]));
    }

    #[test]
    fn sampling_is_seeded_and_bounded() {
        let mut c = tiny();
        c.sample = Some(5);
        c.seed = 7;
        let a = strict_etale(&c);
        let b = strict_etale(&c);
        assert_eq!(a, b);
        assert_eq!(a.theorem("strict-iff-etale-axiom").unwrap().instances, 5);
    }

    #[test]
    fn failures_are_reported_with_witness_lines() {
        let t = TheoremReport::from_results("demo", "a statement", vec![None, Some("x=1".into()), None]);
        assert_eq!((t.instances, t.passed), (3, 2));
        let r = SuiteReport { suite: "demo", config: tiny(), theorems: vec![t], notes: vec![] };
        let text = r.to_string();
        assert!(text.contains("WITNESS: suite=demo theorem=demo x=1"));
        assert!(text.contains("result: FAIL"));
    }
}
