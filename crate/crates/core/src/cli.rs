//! Command-line front end: input parsing, subcommands and report printing.
//!
//! Input files are line oriented. `#` starts a comment. A block opens with a
//! header line and collects the body lines after it:
//!
//! ```text
//! poset X            map f DOM COD        presheaf F X
//! elem a b           send a pt            fiber a x1 x2
//! cover a b                               restrict a b x1 y
//! ```
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (a `WITNESS:`
//! line is printed), 2 for unreadable input or bad usage.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::duality::{dual_of_monotone_map, dual_of_pmorphism, dual_space};
use crate::etale::{etale_axiom_value, failure_witness, HAlgebra};
use crate::heyting::{find_isomorphism, FiniteHeytingAlgebra, HeytingHom};
use crate::limits::{bundle_product, dl_pushout, etale_coproduct};
use crate::poset::{FinitePoset, PosetMap};
use crate::presheaf::{grothendieck, Bundle, Presheaf};
use crate::suites::{run_suite, SuiteConfig, SUITES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("line {line}: syntax error: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: unresolved reference `{name}`")]
    UnresolvedReference { line: usize, name: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, message: impl Into<String>) -> CliError {
    CliError::SyntaxError { line, message: message.into() }
}

fn unresolved(line: usize, name: &str) -> CliError {
    CliError::UnresolvedReference { line, name: name.to_string() }
}

/// Everything declared in an input file, in declaration order.
#[derive(Debug, Clone, Default)]
pub struct InputDocument {
    pub posets: Vec<(String, Arc<FinitePoset>)>,
    pub maps: Vec<(String, PosetMap)>,
    pub presheaves: Vec<(String, Presheaf)>,
}

impl InputDocument {
    pub fn poset(&self, name: &str) -> Option<&Arc<FinitePoset>> {
        self.posets.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn map(&self, name: &str) -> Option<&PosetMap> {
        self.maps.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn presheaf(&self, name: &str) -> Option<&Presheaf> {
        self.presheaves.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }
}

enum Block {
    Poset {
        name: String,
        line: usize,
        elems: Vec<(String, usize)>,
        covers: Vec<(String, String, usize)>,
    },
    Map {
        name: String,
        line: usize,
        dom: String,
        cod: String,
        sends: Vec<(String, String, usize)>,
    },
    Presheaf {
        name: String,
        line: usize,
        base: String,
        fibers: Vec<(String, Vec<String>, usize)>,
        restricts: Vec<([String; 4], usize)>,
    },
}

pub fn parse_file(path: &Path) -> Result<InputDocument, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<InputDocument, CliError> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some((&kw, args)) = words.split_first() else {
            continue;
        };
        let owned = |s: &&str| s.to_string();
        match kw {
            "poset" => {
                let [name] = args else { return Err(syntax(line, "expected `poset NAME`")) };
                blocks.push(Block::Poset { name: name.to_string(), line, elems: Vec::new(), covers: Vec::new() });
            }
            "map" => {
                let [name, dom, cod] = args else { return Err(syntax(line, "expected `map NAME DOMPOSET CODPOSET`")) };
                blocks.push(Block::Map {
                    name: name.to_string(),
                    line,
                    dom: dom.to_string(),
                    cod: cod.to_string(),
                    sends: Vec::new(),
                });
            }
            "presheaf" => {
                let [name, base] = args else { return Err(syntax(line, "expected `presheaf NAME BASEPOSET`")) };
                blocks.push(Block::Presheaf {
                    name: name.to_string(),
                    line,
                    base: base.to_string(),
                    fibers: Vec::new(),
                    restricts: Vec::new(),
                });
            }
            "elem" => match blocks.last_mut() {
                Some(Block::Poset { elems, .. }) => {
                    if args.is_empty() {
                        return Err(syntax(line, "expected `elem ID...`"));
                    }
                    elems.extend(args.iter().map(|a| (a.to_string(), line)));
                }
                _ => return Err(syntax(line, "`elem` outside a poset block")),
            },
            "cover" => match blocks.last_mut() {
                Some(Block::Poset { covers, .. }) => {
                    let [a, b] = args else { return Err(syntax(line, "expected `cover ID ID`")) };
                    covers.push((a.to_string(), b.to_string(), line));
                }
                _ => return Err(syntax(line, "`cover` outside a poset block")),
            },
            "send" => match blocks.last_mut() {
                Some(Block::Map { sends, .. }) => {
                    let [a, b] = args else { return Err(syntax(line, "expected `send ID ID`")) };
                    sends.push((a.to_string(), b.to_string(), line));
                }
                _ => return Err(syntax(line, "`send` outside a map block")),
            },
            "fiber" => match blocks.last_mut() {
                Some(Block::Presheaf { fibers, .. }) => {
                    let Some((x, ids)) = args.split_first() else {
                        return Err(syntax(line, "expected `fiber POSET_ELEM ID...`"));
                    };
                    fibers.push((x.to_string(), ids.iter().map(owned).collect(), line));
                }
                _ => return Err(syntax(line, "`fiber` outside a presheaf block")),
            },
            "restrict" => match blocks.last_mut() {
                Some(Block::Presheaf { restricts, .. }) => {
                    let [x, y, a, b] = args else {
                        return Err(syntax(line, "expected `restrict POSET_ELEM POSET_ELEM FIBER_ID FIBER_ID`"));
                    };
                    restricts.push(([x, y, a, b].map(|s| s.to_string()), line));
                }
                _ => return Err(syntax(line, "`restrict` outside a presheaf block")),
            },
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }

    let mut names: HashMap<String, usize> = HashMap::new();
    for b in &blocks {
        let (name, line) = match b {
            Block::Poset { name, line, .. } | Block::Map { name, line, .. } | Block::Presheaf { name, line, .. } => {
                (name, *line)
            }
        };
        if let Some(first) = names.insert(name.clone(), line) {
            return Err(syntax(line, format!("`{name}` already declared on line {first}")));
        }
    }

    let mut doc = InputDocument::default();
    for b in &blocks {
        if let Block::Poset { name, line, elems, covers } = b {
            doc.posets.push((name.clone(), Arc::new(build_poset(*line, elems, covers)?)));
        }
    }
    for b in &blocks {
        match b {
            Block::Map { name, line, dom, cod, sends } => {
                let d = doc.poset(dom).ok_or_else(|| unresolved(*line, dom))?.clone();
                let c = doc.poset(cod).ok_or_else(|| unresolved(*line, cod))?.clone();
                let mut images = vec![usize::MAX; d.len()];
                for (a, b, l) in sends {
                    let x = d.index_of(a).map_err(|_| unresolved(*l, a))?;
                    let y = c.index_of(b).map_err(|_| unresolved(*l, b))?;
                    if images[x] != usize::MAX {
                        return Err(syntax(*l, format!("`{a}` is sent twice")));
                    }
                    images[x] = y;
                }
                if let Some(x) = images.iter().position(|&y| y == usize::MAX) {
                    return Err(syntax(*line, format!("map `{name}` does not send `{}`", d.label(x))));
                }
                let m = PosetMap::new(d, c, images).map_err(|e| syntax(*line, e.to_string()))?;
                doc.maps.push((name.clone(), m));
            }
            Block::Presheaf { name, line, base, fibers, restricts } => {
                let x = doc.poset(base).ok_or_else(|| unresolved(*line, base))?.clone();
                doc.presheaves.push((name.clone(), build_presheaf(*line, x, fibers, restricts)?));
            }
            Block::Poset { .. } => {}
        }
    }
    Ok(doc)
}

fn build_poset(
    line: usize,
    elems: &[(String, usize)],
    covers: &[(String, String, usize)],
) -> Result<FinitePoset, CliError> {
    let mut labels: Vec<String> = Vec::new();
    for (e, l) in elems {
        if labels.contains(e) {
            return Err(syntax(*l, format!("element `{e}` declared twice")));
        }
        labels.push(e.clone());
    }
    let find = |s: &str, l: usize| labels.iter().position(|e| e == s).ok_or_else(|| unresolved(l, s));
    let mut pairs = Vec::new();
    for (a, b, l) in covers {
        let (x, y) = (find(a, *l)?, find(b, *l)?);
        if x == y {
            return Err(syntax(*l, format!("`{a}` cannot cover itself")));
        }
        pairs.push((x, y));
    }
    FinitePoset::from_covers(labels.clone(), &pairs).map_err(|e| syntax(line, e.to_string()))
}

fn build_presheaf(
    line: usize,
    base: Arc<FinitePoset>,
    fibers: &[(String, Vec<String>, usize)],
    restricts: &[([String; 4], usize)],
) -> Result<Presheaf, CliError> {
    let n = base.len();
    let mut fiber_ids: Vec<Option<Vec<String>>> = vec![None; n];
    for (x, ids, l) in fibers {
        let p = base.index_of(x).map_err(|_| unresolved(*l, x))?;
        if fiber_ids[p].is_some() {
            return Err(syntax(*l, format!("fiber over `{x}` given twice")));
        }
        for (k, id) in ids.iter().enumerate() {
            if ids[..k].contains(id) {
                return Err(syntax(*l, format!("fiber element `{id}` repeated")));
            }
        }
        fiber_ids[p] = Some(ids.clone());
    }
    let fiber_ids: Vec<Vec<String>> = fiber_ids.into_iter().map(Option::unwrap_or_default).collect();
    let mut partial: BTreeMap<(usize, usize), Vec<Option<usize>>> = BTreeMap::new();
    let mut first_line: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for ([x, y, a, b], l) in restricts {
        let px = base.index_of(x).map_err(|_| unresolved(*l, x))?;
        let py = base.index_of(y).map_err(|_| unresolved(*l, y))?;
        if !base.lt(px, py) {
            return Err(syntax(*l, format!("`{x}` is not strictly below `{y}`")));
        }
        let i = fiber_ids[px].iter().position(|s| s == a).ok_or_else(|| unresolved(*l, a))?;
        let j = fiber_ids[py].iter().position(|s| s == b).ok_or_else(|| unresolved(*l, b))?;
        let slot = partial.entry((px, py)).or_insert_with(|| vec![None; fiber_ids[px].len()]);
        first_line.entry((px, py)).or_insert(*l);
        if slot[i].is_some_and(|v| v != j) {
            return Err(syntax(*l, format!("`{a}` restricted twice along {x} -> {y}")));
        }
        slot[i] = Some(j);
    }
    let mut given = Vec::new();
    for ((px, py), slot) in partial {
        if let Some(i) = slot.iter().position(Option::is_none) {
            return Err(syntax(
                first_line[&(px, py)],
                format!("restriction {} -> {} does not cover `{}`", base.label(px), base.label(py), fiber_ids[px][i]),
            ));
        }
        given.push(((px, py), slot.into_iter().map(Option::unwrap).collect()));
    }
    Presheaf::new(base, fiber_ids, &given).map_err(|e| syntax(line, e.to_string()))
}

#[derive(Parser, Debug)]
#[command(name = "etale", version, about = "Finite posets, Heyting algebras and etale algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print Up(X) of a poset, or the prime-filter poset of a lattice.
    Dualize {
        #[command(flatten)]
        source: PosetOrAlgebra,
        /// Poset block to use; defaults to the first one.
        #[arg(long)]
        name: Option<String>,
    },
    /// Check a property of a declared map.
    Check {
        kind: CheckKind,
        file: PathBuf,
        #[arg(long)]
        map: String,
    },
    /// Print the Grothendieck bundle of a presheaf.
    Grothendieck {
        file: PathBuf,
        #[arg(long)]
        presheaf: String,
    },
    /// Product of two bundles (maps or presheaves) over a common base.
    Product(Pair),
    /// Pushout of the duals of two maps into a common base.
    Pushout(Pair),
    /// Run exhaustive verification suites.
    Verify {
        #[arg(long, value_parser = suite_name)]
        suite: String,
        #[arg(long, default_value_t = SuiteConfig::default().max_base)]
        max_base: usize,
        #[arg(long, default_value_t = SuiteConfig::default().max_total)]
        max_total: usize,
        #[arg(long, default_value_t = SuiteConfig::default().max_fiber)]
        max_fiber: usize,
        /// Seed for down-sampling with --sample.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check a random subset of at most this many instances per theorem.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Emit the Hasse diagram in Graphviz DOT.
    Dot {
        #[command(flatten)]
        source: PosetOrBundle,
        /// Block to draw; defaults to the first suitable one.
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct PosetOrAlgebra {
    #[arg(long)]
    poset: Option<PathBuf>,
    /// File whose poset block is read as the order of a finite lattice.
    #[arg(long)]
    algebra: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct PosetOrBundle {
    #[arg(long)]
    poset: Option<PathBuf>,
    /// File holding a map or presheaf; draws its total grouped by fiber.
    #[arg(long)]
    bundle: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Pair {
    file: PathBuf,
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CheckKind {
    Monotone,
    Pmorphism,
    Strict,
    Etale,
}

fn suite_name(s: &str) -> Result<String, String> {
    if s == "all" || SUITES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("expected one of: {}, all", SUITES.join(", ")))
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

type Outcome = Result<(String, i32), CliError>;

fn execute(command: Command) -> Outcome {
    match command {
        Command::Dualize { source, name } => match (source.poset, source.algebra) {
            (Some(path), _) => dualize_poset(&parse_file(&path)?, name.as_deref()),
            (_, Some(path)) => dualize_algebra(&parse_file(&path)?, name.as_deref()),
            _ => unreachable!("clap requires one source"),
        },
        Command::Check { kind, file, map } => {
            let doc = parse_file(&file)?;
            let f = doc.map(&map).ok_or_else(|| CliError::Invalid(format!("no map named `{map}`")))?;
            Ok(check_map(kind, &map, f))
        }
        Command::Grothendieck { file, presheaf } => {
            let doc = parse_file(&file)?;
            let f =
                doc.presheaf(&presheaf).ok_or_else(|| CliError::Invalid(format!("no presheaf named `{presheaf}`")))?;
            let b = grothendieck(f).map_err(|e| CliError::Invalid(e.to_string()))?;
            let mut s = String::new();
            let base_name = base_name_of(&doc, b.base());
            let total = format!("{presheaf}_total");
            write_poset(&mut s, &total, b.total());
            write_map(&mut s, &format!("{presheaf}_projection"), &total, &base_name, b.projection());
            Ok((s, 0))
        }
        Command::Product(pair) => {
            let doc = parse_file(&pair.file)?;
            let (l, r) = (bundle_named(&doc, &pair.left)?, bundle_named(&doc, &pair.right)?);
            let p = bundle_product(&l, &r).map_err(|e| CliError::Invalid(e.to_string()))?;
            let mut s = String::new();
            let total = format!("{}_x_{}", pair.left, pair.right);
            write_poset(&mut s, &total, p.total());
            write_map(&mut s, &format!("{total}_projection"), &total, &base_name_of(&doc, p.base()), p.projection());
            Ok((s, 0))
        }
        Command::Pushout(pair) => pushout(&parse_file(&pair.file)?, &pair.left, &pair.right),
        Command::Verify { suite, max_base, max_total, max_fiber, seed, sample } => {
            let config = SuiteConfig { max_base, max_total, max_fiber, seed, sample };
            let reports = run_suite(&suite, &config).expect("suite name validated");
            let mut s = String::new();
            for r in &reports {
                s.push_str(&r.to_string());
            }
            let ok = reports.iter().all(|r| r.ok());
            let _ = writeln!(s, "overall: {}", if ok { "PASS" } else { "FAIL" });
            Ok((s, if ok { 0 } else { 1 }))
        }
        Command::Dot { source, name } => match (source.poset, source.bundle) {
            (Some(path), _) => {
                let doc = parse_file(&path)?;
                let (n, p) = pick_poset(&doc, name.as_deref())?;
                Ok((dot_poset(n, p), 0))
            }
            (_, Some(path)) => {
                let doc = parse_file(&path)?;
                let (n, b) = pick_bundle(&doc, name.as_deref())?;
                Ok((dot_bundle(&n, &b), 0))
            }
            _ => unreachable!("clap requires one source"),
        },
    }
}

fn pick_poset<'a>(doc: &'a InputDocument, name: Option<&'a str>) -> Result<(&'a str, &'a Arc<FinitePoset>), CliError> {
    match name {
        Some(n) => doc.poset(n).map(|p| (n, p)).ok_or_else(|| CliError::Invalid(format!("no poset named `{n}`"))),
        None => doc
            .posets
            .first()
            .map(|(n, p)| (n.as_str(), p))
            .ok_or_else(|| CliError::Invalid("file declares no poset".into())),
    }
}

fn pick_bundle(doc: &InputDocument, name: Option<&str>) -> Result<(String, Bundle), CliError> {
    let name = match name {
        Some(n) => n.to_string(),
        None => doc
            .presheaves
            .first()
            .map(|(n, _)| n.clone())
            .or_else(|| doc.maps.first().map(|(n, _)| n.clone()))
            .ok_or_else(|| CliError::Invalid("file declares no map or presheaf".into()))?,
    };
    let b = bundle_named(doc, &name)?;
    Ok((name, b))
}

/// A presheaf's Grothendieck bundle, or a map that is a strict p-morphism.
fn bundle_named(doc: &InputDocument, name: &str) -> Result<Bundle, CliError> {
    if let Some(f) = doc.presheaf(name) {
        return grothendieck(f).map_err(|e| CliError::Invalid(e.to_string()));
    }
    let m = doc.map(name).ok_or_else(|| CliError::Invalid(format!("no map or presheaf named `{name}`")))?;
    Bundle::new(m.clone()).map_err(|e| CliError::Invalid(format!("`{name}`: {e}")))
}

fn base_name_of(doc: &InputDocument, base: &FinitePoset) -> String {
    doc.posets
        .iter()
        .find(|(_, p)| p.same_order(base) && p.labels() == base.labels())
        .map(|(n, _)| n.clone())
        .unwrap_or_else(|| "base".to_string())
}

fn write_poset(s: &mut String, name: &str, p: &FinitePoset) {
    let _ = writeln!(s, "poset {name}");
    if !p.is_empty() {
        let _ = writeln!(s, "elem {}", p.labels().join(" "));
    }
    for (a, b) in p.cover_labels() {
        let _ = writeln!(s, "cover {a} {b}");
    }
}

fn write_map(s: &mut String, name: &str, dom: &str, cod: &str, f: &PosetMap) {
    let _ = writeln!(s, "map {name} {dom} {cod}");
    for x in 0..f.domain().len() {
        let _ = writeln!(s, "send {} {}", f.domain().label(x), f.codomain().label(f.apply(x)));
    }
}

fn dualize_poset(doc: &InputDocument, name: Option<&str>) -> Outcome {
    let (n, p) = pick_poset(doc, name)?;
    let up = FiniteHeytingAlgebra::upset_algebra(p.clone()).map_err(|e| CliError::Invalid(e.to_string()))?;
    let order = up.order_poset().expect("upset algebras are lattices");
    let mut s = String::new();
    let _ = writeln!(s, "# upset algebra of {n}: {} elements, ordered by inclusion", up.len());
    write_poset(&mut s, &format!("Up_{n}"), &order);
    Ok((s, 0))
}

fn dualize_algebra(doc: &InputDocument, name: Option<&str>) -> Outcome {
    let (n, p) = pick_poset(doc, name)?;
    let alg = FiniteHeytingAlgebra::from_lattice_order(p).map_err(|e| CliError::Invalid(format!("`{n}`: {e}")))?;
    let space = dual_space(&alg).map_err(|e| CliError::Invalid(e.to_string()))?;
    let mut s = String::new();
    let _ = writeln!(s, "# prime filters of {n}: {} points, ordered by inclusion", space.poset().len());
    write_poset(&mut s, &format!("dual_{n}"), space.poset());
    Ok((s, 0))
}

fn check_map(kind: CheckKind, name: &str, f: &PosetMap) -> (String, i32) {
    let (d, c) = (f.domain(), f.codomain());
    let mut s = String::new();
    let fail = |s: &mut String, verdict: &str, human: String, witness: String| {
        let _ = writeln!(s, "{name}: not {verdict}");
        let _ = writeln!(s, "{human}");
        let _ = writeln!(s, "WITNESS: {witness}");
        1
    };
    if let Some((x1, x2)) = f.monotonicity_violation() {
        let human = format!(
            "{} <= {} but {} and {} are not ordered",
            d.label(x1),
            d.label(x2),
            c.label(f.apply(x1)),
            c.label(f.apply(x2))
        );
        let w = format!("kind=order x1={} x2={}", d.label(x1), d.label(x2));
        let code = fail(&mut s, "monotone", human, w);
        return (s, code);
    }
    if let CheckKind::Monotone = kind {
        let _ = writeln!(s, "{name}: monotone");
        return (s, 0);
    }
    if let Some((x, y)) = f.back_condition_violation() {
        let human = format!("no element above {} maps to {}", d.label(x), c.label(y));
        let w = format!("kind=back-condition x={} y={}", d.label(x), c.label(y));
        let code = fail(&mut s, "a p-morphism", human, w);
        return (s, code);
    }
    match kind {
        CheckKind::Monotone => unreachable!(),
        CheckKind::Pmorphism => {
            let _ = writeln!(s, "{name}: p-morphism");
            (s, 0)
        }
        CheckKind::Strict => {
            if let Some((x, x1, x2)) = f.strictness_violation() {
                let y = c.label(f.apply(x1));
                let human =
                    format!("two elements above {} map to {}: {} and {}", d.label(x), y, d.label(x1), d.label(x2));
                let w = format!("kind=strictness x={} above={},{} image={}", d.label(x), d.label(x1), d.label(x2), y);
                let code = fail(&mut s, "a strict p-morphism", human, w);
                return (s, code);
            }
            let _ = writeln!(s, "{name}: strict p-morphism");
            (s, 0)
        }
        CheckKind::Etale => {
            let alg = match dual_of_pmorphism(f)
                .map_err(|e| e.to_string())
                .and_then(|h| HAlgebra::new(h).map_err(|e| e.to_string()))
            {
                Ok(a) => a,
                Err(e) => {
                    let _ = writeln!(s, "error: {e}");
                    return (s, 2);
                }
            };
            match failure_witness(&alg) {
                Some(a) => {
                    let carrier = alg.carrier();
                    let value = etale_axiom_value(&alg, a);
                    let human = format!(
                        "the etale axiom evaluates to {} at {} instead of {}",
                        carrier.label(value),
                        carrier.label(a),
                        carrier.label(carrier.top())
                    );
                    let w = format!("kind=upset element={} value={}", carrier.label(a), carrier.label(value));
                    let code = fail(&mut s, "etale", human, w);
                    (s, code)
                }
                None => {
                    let _ = writeln!(s, "{name}: etale");
                    (s, 0)
                }
            }
        }
    }
}

fn pushout(doc: &InputDocument, left: &str, right: &str) -> Outcome {
    let get = |n: &str| doc.map(n).ok_or_else(|| CliError::Invalid(format!("no map named `{n}`")));
    let (f1, f2) = (get(left)?, get(right)?);
    if !f1.codomain().same_order(f2.codomain()) {
        return Err(CliError::Invalid("maps do not share a codomain".into()));
    }
    let invalid = |e: &dyn std::fmt::Display| CliError::Invalid(e.to_string());
    let h = Arc::new(FiniteHeytingAlgebra::upset_algebra(f1.codomain().clone()).map_err(|e| invalid(&e))?);
    let dual = |f: &PosetMap| -> Result<HeytingHom, CliError> {
        let up = Arc::new(FiniteHeytingAlgebra::upset_algebra(f.domain().clone()).map_err(|e| invalid(&e))?);
        dual_of_monotone_map(f, h.clone(), up).map_err(|e| invalid(&e))
    };
    let (c1, c2) = (dual(f1)?, dual(f2)?);
    let po = dl_pushout(&c1, &c2).map_err(|e| invalid(&e))?;
    let mut s = String::new();
    let _ = writeln!(s, "# lattice pushout of the upset maps of {left} and {right}: {} elements", po.apex.len());
    let _ = writeln!(s, "# it is the upset lattice of the poset below");
    let apex = format!("{left}_x_{right}");
    write_poset(&mut s, &apex, &po.pullback.apex);
    let etale = |f: &PosetMap, c: &HeytingHom| {
        f.is_p_morphism() && HAlgebra::new(c.clone()).is_ok_and(|a| failure_witness(&a).is_none())
    };
    if etale(f1, &c1) && etale(f2, &c2) {
        let co = etale_coproduct(&HAlgebra::new(c1.clone()).unwrap(), &HAlgebra::new(c2.clone()).unwrap())
            .map_err(|e| invalid(&e))?;
        let fixed: Vec<(usize, usize)> = c1
            .codomain()
            .elements()
            .map(|x| (co.left.apply(x), po.left.apply(x)))
            .chain(c2.codomain().elements().map(|y| (co.right.apply(y), po.right.apply(y))))
            .collect();
        let agrees = find_isomorphism(co.algebra.carrier(), &po.apex, &fixed).is_some();
        let _ = writeln!(
            s,
            "# etale coproduct: {} elements, {}",
            co.algebra.carrier().len(),
            if agrees { "isomorphic to the pushout with commuting legs" } else { "NOT isomorphic to the pushout" }
        );
        return Ok((s, if agrees { 0 } else { 1 }));
    }
    let _ = writeln!(s, "# etale coproduct: not formed, an input is not etale");
    Ok((s, 0))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn dot_poset(name: &str, p: &FinitePoset) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {} {{", quote(name));
    let _ = writeln!(s, "  rankdir=BT;");
    for l in p.labels() {
        let _ = writeln!(s, "  {};", quote(l));
    }
    for (a, b) in p.cover_labels() {
        let _ = writeln!(s, "  {} -> {};", quote(a), quote(b));
    }
    s.push_str("}\n");
    s
}

pub fn dot_bundle(name: &str, b: &Bundle) -> String {
    let (t, base) = (b.total(), b.base());
    let mut s = String::new();
    let _ = writeln!(s, "digraph {} {{", quote(name));
    let _ = writeln!(s, "  rankdir=BT;");
    for x in 0..base.len() {
        let _ = writeln!(s, "  subgraph {} {{", quote(&format!("cluster_{x}")));
        let _ = writeln!(s, "    label={};", quote(base.label(x)));
        for p in b.fiber(x).iter() {
            let _ = writeln!(s, "    {};", quote(t.label(p)));
        }
        s.push_str("  }\n");
    }
    for (a, c) in t.cover_labels() {
        let _ = writeln!(s, "  {} -> {};", quote(a), quote(c));
    }
    s.push_str("}\n");
    s
}
