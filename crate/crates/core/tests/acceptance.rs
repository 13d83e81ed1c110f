//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//!
//! Criteria 1 to 5 run the exhaustive suites at their acceptance sizes and
//! additionally pin instance counts that can be derived independently.

use std::io::Write;
use std::panic;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use etale::duality::dual_of_pmorphism;
use etale::etale::{etale_axiom_holds, failure_witness, HAlgebra};
use etale::oracle::{all_labeled_posets, all_posets_up_to, all_presheaves};
use etale::poset::{make_poset, FinitePoset, PosetMap};
use etale::suites::{self, SuiteConfig, SuiteReport};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "strict p-morphisms are exactly those with etale duals",
            budget: Some(secs(60)),
            check: strict_iff_etale,
        },
        Criterion {
            id: 2,
            title: "unit and counit are isomorphisms",
            budget: Some(secs(60)),
            check: duality_round_trips,
        },
        Criterion { id: 3, title: "Heyting laws and the local agreement lemma", budget: None, check: heyting_laws },
        Criterion {
            id: 4,
            title: "presheaves and strict bundles correspond",
            budget: Some(secs(120)),
            check: presheaf_equivalence,
        },
        Criterion {
            id: 5,
            title: "etale coproduct is the lattice pushout; products are pointwise",
            budget: Some(secs(120)),
            check: colimits,
        },
        Criterion {
            id: 6,
            title: "negative control: constant map from a 2-chain to a point",
            budget: None,
            check: negative_control,
        },
        Criterion { id: 7, title: "counting goldens", budget: None, check: counting_goldens },
        Criterion { id: 8, title: "infinite example excluded", budget: None, check: out_of_scope },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(c.check).unwrap_or_else(|p| Err(panic_message(p)));
        let elapsed = start.elapsed();
        let result = match (result, c.budget) {
            (Ok(detail), Some(b)) if elapsed > b => {
                Err(format!("{detail}; took {:.1}s, budget {}s", elapsed.as_secs_f64(), b.as_secs()))
            }
            (r, _) => r,
        };
        let (verdict, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{verdict} criterion {}: {} [{:.1}s] {detail}", c.id, c.title, elapsed.as_secs_f64());
        let _ = std::io::stdout().flush();
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    let text = p
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into());
    format!("panicked: {text}")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn config(max_base: usize, max_total: usize, max_fiber: usize) -> SuiteConfig {
    SuiteConfig { max_base, max_total, max_fiber, ..SuiteConfig::default() }
}

/// Every named theorem must be present, non-vacuous and fully passing.
fn require(report: &SuiteReport, names: &[&str]) -> Outcome {
    let mut parts = Vec::new();
    for &name in names {
        let t = report.theorem(name).ok_or_else(|| format!("theorem {name} missing from suite {}", report.suite))?;
        ensure(t.instances > 0, || format!("{name}: no instances"))?;
        ensure(t.ok(), || {
            format!(
                "{name}: {}/{} passed; first failure: {}",
                t.passed,
                t.instances,
                t.failures.first().map_or("", |s| s)
            )
        })?;
        parts.push(format!("{name} {}/{}", t.passed, t.instances));
    }
    Ok(parts.join(", "))
}

/// Labeled posets on 0..=n points: 1, 1, 3, 19, 219, 4231.
fn labeled_posets_up_to(n: usize) -> usize {
    [1, 1, 3, 19, 219, 4231][..=n].iter().sum()
}

fn strict_iff_etale() -> Outcome {
    let report = suites::strict_etale(&config(3, 4, 2));
    require(&report, &["strict-iff-etale-axiom"])
}

fn duality_round_trips() -> Outcome {
    let report = suites::duality_roundtrip(&config(3, 5, 2));
    let detail = require(&report, &["unit-is-order-isomorphism", "counit-is-heyting-isomorphism"])?;
    let expected = labeled_posets_up_to(5);
    let unit = report.theorem("unit-is-order-isomorphism").unwrap();
    ensure(unit.instances == expected, || format!("expected {expected} posets, saw {}", unit.instances))?;
    Ok(detail)
}

fn heyting_laws() -> Outcome {
    let report = suites::heyting_laws(&config(3, 5, 2));
    let detail = require(&report, &["upset-algebra-is-heyting", "local-agreement-lemma"])?;
    let laws = report.theorem("upset-algebra-is-heyting").unwrap();
    let lemma = report.theorem("local-agreement-lemma").unwrap();
    ensure(laws.instances == labeled_posets_up_to(5), || format!("laws checked on {} posets", laws.instances))?;
    ensure(lemma.instances == labeled_posets_up_to(4), || format!("lemma checked on {} posets", lemma.instances))?;
    Ok(detail)
}

fn presheaf_equivalence() -> Outcome {
    let report = suites::equivalence(&config(3, 4, 2));
    require(
        &report,
        &[
            "grothendieck-is-strict",
            "bundle-round-trip",
            "presheaf-round-trip",
            "m-is-homomorphism",
            "product-embedding-injective",
        ],
    )
}

fn colimits() -> Outcome {
    let report = suites::colimits(&config(3, 4, 2));
    let detail = require(&report, &["coproduct-is-pushout", "product-is-pointwise"])?;
    // Coproducts pair bundles over a common base.
    let expected: usize = all_posets_up_to(3).iter().map(|x| all_presheaves(x, 2).len().pow(2)).sum();
    let pairs = report.theorem("coproduct-is-pushout").unwrap().instances;
    ensure(pairs == expected, || format!("{pairs} pairs checked, expected {expected}"))?;
    Ok(detail)
}

fn negative_control() -> Outcome {
    let c2 = Arc::new(make_poset(&["a", "b"], &[("a", "b")]).map_err(|e| e.to_string())?);
    let pt = Arc::new(make_poset(&["pt"], &[]).map_err(|e| e.to_string())?);
    let k = PosetMap::constant(c2, pt, 0).map_err(|e| e.to_string())?;
    ensure(k.is_p_morphism(), || "constant map is not a p-morphism".into())?;
    ensure(!k.is_strict_p_morphism(), || "constant map is strict".into())?;
    let dual = HAlgebra::new(dual_of_pmorphism(&k).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(!etale_axiom_holds(&dual), || "dual satisfies the etale axiom".into())?;
    let w = failure_witness(&dual).ok_or("no failure witness")?;
    let label = dual.carrier().label(w).to_string();
    ensure(label == "{b}", || format!("witness {label}, expected {{b}}"))?;

    let dir = std::env::temp_dir().join(format!("etale-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let input = dir.join("c2_to_pt.txt");
    std::fs::write(&input, "poset C2\nelem a b\ncover a b\n\nposet Pt\nelem pt\n\nmap k C2 Pt\nsend a pt\nsend b pt\n")
        .map_err(|e| e.to_string())?;
    let output = Command::new(env!("CARGO_BIN_EXE_etale"))
        .args(["check", "etale"])
        .arg(&input)
        .args(["--map", "k"])
        .output()
        .map_err(|e| e.to_string());
    let _ = std::fs::remove_dir_all(&dir);
    let output = output?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    ensure(output.status.code() == Some(1), || format!("cli exit {:?}", output.status.code()))?;
    ensure(stdout.contains("WITNESS: kind=upset element={b}"), || format!("cli output lacks witness: {stdout}"))?;
    Ok(format!("witness {label}; cli exit 1"))
}

/// Reflexive, antisymmetric, transitive relations on `n` labeled points.
fn relation_filter_count(n: usize) -> usize {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .filter(|bits| {
            let rel = |i: usize, j: usize| {
                i == j || pairs.iter().position(|&p| p == (i, j)).is_some_and(|k| bits >> k & 1 == 1)
            };
            let antisymmetric = pairs.iter().all(|&(i, j)| !(rel(i, j) && rel(j, i)));
            let transitive = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(rel(i, j) && rel(j, k)) || rel(i, k))));
            antisymmetric && transitive
        })
        .count()
}

fn counting_goldens() -> Outcome {
    for n in 0..=10 {
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let chain = FinitePoset::chain(&labels).map_err(|e| e.to_string())?;
        let antichain = FinitePoset::antichain(&labels).map_err(|e| e.to_string())?;
        ensure(chain.all_upsets().len() == n + 1, || format!("{n}-chain has {} upsets", chain.all_upsets().len()))?;
        ensure(antichain.all_upsets().len() == 1 << n, || {
            format!("{n}-antichain has {} upsets", antichain.all_upsets().len())
        })?;
    }
    let filtered = relation_filter_count(3);
    let generated = all_labeled_posets(3).count();
    ensure(filtered == 19, || format!("relation filter counts {filtered}"))?;
    ensure(generated == filtered, || format!("generator counts {generated}, filter {filtered}"))?;
    Ok("chains n+1 and antichains 2^n for n <= 10; 19 labeled posets on 3 points".into())
}

fn out_of_scope() -> Outcome {
    Ok("the infinite example on omega+1 and omega+2 is out of scope at finite size; \
        criterion 6 is its finite stand-in for a p-morphism that is not strict"
        .into())
}
