//! The `unilab` command-line front end.
//!
//! Every verb loads JSON fixtures, calls into `unilab-core`, and prints one
//! JSON report to standard output. Exit status: 0 on success, 1 when the
//! report shows a violated axiom or a falsified property, 2 on malformed
//! input.

pub mod checker;
pub mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use unilab_core::connectivity::{chain_components, dim0_report, is_chain_connected, rational_r_chain};
use unilab_core::exact::{format_rational, parse_rational};
use unilab_core::groups::{
    generated_subgroup, hausdorff_check, invariance, relation_left, relation_right, subgroup_check, tau_from_subgroups,
};
use unilab_core::metrics::{validate, SemiMetricJson};
use unilab_core::relation::RelationJson;
use unilab_core::scalars::{farey_samples, padic_valuation, validate_absolute_value, AbsKind, AbsoluteValue};
use unilab_core::uniformity::{validate_base, ENUMERATION_CAP};
use unilab_core::{ElementSet, Error, FiniteGroup, FiniteSpace, QParam, Rational, Relation, UniformityBase};

use crate::sweep::{SweepConfig, SweepError};

#[derive(Parser, Debug)]
#[command(name = "unilab", version, about = "Finite uniform spaces with exact arithmetic")]
pub struct Cli {
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a distance matrix against the semimetric axioms, or a relation
    /// family against the base axioms.
    Validate {
        #[arg(long, required_unless_present = "base", conflicts_with = "base")]
        metric: Option<PathBuf>,
        #[arg(long)]
        base: Option<PathBuf>,
        /// Override the level stored in the metric file ("inf" or "q:p/q").
        #[arg(long)]
        level: Option<String>,
    },
    /// List the open sets of the associated topology.
    Topology {
        #[arg(long)]
        base: PathBuf,
    },
    /// Closure and interior of a subset.
    Closure {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Chain components and the chain-connectedness verdict for a subset.
    Chain {
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Dimension-zero and total-separation classification.
    Dim0 {
        #[arg(long)]
        base: PathBuf,
    },
    /// Uniform and topological continuity of a map between two spaces.
    Ucont {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Images of 0, 1, ... as a comma-separated list.
        #[arg(long)]
        map: String,
    },
    /// Product base; pair (i, j) is index i·|right| + j.
    Product {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Finite-group reports.
    Group {
        #[command(subcommand)]
        command: GroupCommand,
    },
    /// p-adic valuation and absolute value of a rational.
    Padic {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Exhaustive absolute-value check over rationals of bounded height.
    AbsvalCheck {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 20)]
        height: u64,
        /// Level to check ("inf" or "q:p/q"); defaults to inf for
        /// ultrametric kinds and q:1 for the standard one.
        #[arg(long)]
        level: Option<String>,
        #[arg(long, default_value = "1")]
        power: String,
    },
    /// A chain of rationals with consecutive gaps below r.
    Qchain {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long)]
        r: String,
    },
    /// Seeded property sweep.
    Sweep {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        /// Suite to run; repeat for several. Defaults to all suites.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GroupCommand {
    /// Subgroup, normality and invariance reports for a subset.
    Analyze {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        subset: String,
    },
    /// The topology generated by a family of subgroups.
    Tau {
        #[arg(long)]
        group: PathBuf,
        /// JSON array of index arrays.
        #[arg(long)]
        subgroups: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Trivial,
    Padic,
    Standard,
}

/// Exit status plus the text for standard output and standard error.
#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        Failure(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// A report and whether it shows a violation.
struct Report {
    value: Value,
    violated: bool,
}

impl Report {
    fn ok(value: Value) -> Self {
        Report { value, violated: false }
    }
}

pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(report) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&report.value)
            } else {
                serde_json::to_string(&report.value)
            }
            .expect("JSON values serialize");
            Outcome { code: if report.violated { 1 } else { 0 }, stdout: text + "\n", stderr: String::new() }
        }
        Err(Failure(msg)) => {
            Outcome { code: 2, stdout: String::new(), stderr: json!({ "error": msg }).to_string() + "\n" }
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Res<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_base(path: &Path) -> Res<UniformityBase> {
    read_json(path)
}

/// Enumeration cap from `UNILAB_MAX_SIZE`, never above the library's own.
fn enumeration_cap() -> Res<usize> {
    match std::env::var("UNILAB_MAX_SIZE") {
        Ok(s) => {
            let v: usize = s.trim().parse().map_err(|_| Failure(format!("UNILAB_MAX_SIZE: not a number: {s:?}")))?;
            Ok(v.min(ENUMERATION_CAP))
        }
        Err(_) => Ok(ENUMERATION_CAP),
    }
}

fn check_cap(n: usize) -> Res<()> {
    let cap = enumeration_cap()?;
    if n > cap {
        return Err(Error::SpaceTooLargeForEnumeration { size: n, cap }.into());
    }
    Ok(())
}

fn parse_indices(s: &str, n: usize) -> Res<ElementSet> {
    let items = parse_list(s)?;
    Ok(ElementSet::from_indices(n, items)?)
}

fn parse_list(s: &str) -> Res<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure(format!("not an index: {t:?}"))))
        .collect()
}

fn sets(list: &[ElementSet]) -> Value {
    let mut sorted = list.to_vec();
    sorted.sort();
    json!(sorted.iter().map(ElementSet::to_vec).collect::<Vec<_>>())
}

fn dispatch(cmd: &Command) -> Res<Report> {
    match cmd {
        Command::Validate { metric: Some(path), level, .. } => validate_metric(path, level.as_deref()),
        Command::Validate { base: Some(path), .. } => validate_base_file(path),
        Command::Validate { .. } => Err(Failure("one of --metric or --base is required".into())),
        Command::Topology { base } => {
            let b = load_base(base)?;
            check_cap(b.size())?;
            let t = b.topology()?;
            Ok(Report::ok(json!({
                "size": b.size(),
                "open_count": t.opens().len(),
                "opens": sets(t.opens()),
                "hausdorff": b.is_hausdorff(),
            })))
        }
        Command::Closure { base, set } => {
            let b = load_base(base)?;
            check_cap(b.size())?;
            let a = parse_indices(set, b.size())?;
            let (c, i) = (b.closure(&a), b.interior(&a));
            Ok(Report::ok(json!({
                "set": a.to_vec(),
                "closure": c.to_vec(),
                "interior": i.to_vec(),
                "closed": c == a,
                "open": i == a,
            })))
        }
        Command::Chain { space, base, set } => chain(space.as_deref(), base, set),
        Command::Dim0 { base } => {
            let b = load_base(base)?;
            check_cap(b.size())?;
            Ok(Report::ok(serde_json::to_value(dim0_report(&b)?).expect("serializable")))
        }
        Command::Ucont { source, target, map } => {
            let (src, dst) = (load_base(source)?, load_base(target)?);
            check_cap(dst.size())?;
            let f = parse_list(map)?;
            let r = src.uniformly_continuous(&f, &dst)?;
            Ok(Report::ok(json!({
                "uniformly_continuous": r.uniformly_continuous,
                "witness": r.witness,
                "continuous": src.continuous(&f, &dst)?,
            })))
        }
        Command::Product { left, right } => {
            let p = load_base(left)?.product(&load_base(right)?)?;
            Ok(Report::ok(serde_json::to_value(&p).expect("serializable")))
        }
        Command::Group { command } => group(command),
        Command::Padic { p, x } => {
            let av = AbsoluteValue::padic(*p)?;
            let x = parse_rational(x)?;
            let v = padic_valuation(*p, &x)?;
            Ok(Report::ok(json!({ "valuation": v, "abs": av.eval(&x).to_string() })))
        }
        Command::AbsvalCheck { kind, p, height, level, power } => absval_check(*kind, *p, *height, level.as_deref(), power),
        Command::Qchain { from, to, r } => {
            let (a, b, r) = (parse_rational(from)?, parse_rational(to)?, parse_rational(r)?);
            let chain = rational_r_chain(&a, &b, &r)?;
            Ok(Report::ok(json!({
                "from": format_rational(&a),
                "to": format_rational(&b),
                "r": format_rational(&r),
                "length": chain.len(),
                "points": chain.iter().map(format_rational).collect::<Vec<_>>(),
            })))
        }
        Command::Sweep { seed, instances, max_size, suites } => {
            let cfg = SweepConfig::new(*seed, *instances, *max_size, suites.clone())?;
            let report = sweep::sweep(&cfg);
            Ok(Report { violated: !report.all_passed(), value: report.to_json() })
        }
    }
}

fn validate_metric(path: &Path, level: Option<&str>) -> Res<Report> {
    let raw: SemiMetricJson = read_json(path)?;
    let level = match level {
        Some(s) => QParam::parse(s)?,
        None => raw.level,
    };
    let values = raw
        .values
        .iter()
        .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<Rational>, Error>>())
        .collect::<Result<Vec<_>, Error>>()?;
    if values.len() != raw.size {
        return Err(Error::ShapeMismatch.into());
    }
    let report = validate(&values, &level)?;
    let mut value = json!({ "valid": report.valid(), "is_metric": report.is_metric, "level": report.level });
    if !report.valid() {
        value["violations"] = serde_json::to_value(&report.violations).expect("serializable");
    }
    Ok(Report { value, violated: !report.valid() })
}

#[derive(serde::Deserialize)]
struct RawBase {
    size: usize,
    relations: Vec<RelationJson>,
}

fn validate_base_file(path: &Path) -> Res<Report> {
    let raw: RawBase = read_json(path)?;
    let relations = raw.relations.into_iter().map(Relation::try_from).collect::<Result<Vec<_>, Error>>()?;
    if let Some(r) = relations.iter().find(|r| r.size() != raw.size) {
        return Err(Error::SpaceMismatch { left: raw.size, right: r.size() }.into());
    }
    let report = validate_base(&relations)?;
    let mut value = json!({ "valid": report.valid(), "size": raw.size });
    if !report.valid() {
        value["violations"] = serde_json::to_value(&report.violations).expect("serializable");
    }
    Ok(Report { value, violated: !report.valid() })
}

/// Components of `e` under every base element at once: two points share a
/// component when they are chained inside `e` for each symmetrized element,
/// so the partition is the common refinement of the per-element ones.
fn chain(space: Option<&Path>, base: &Path, set: &str) -> Res<Report> {
    let b = load_base(base)?;
    let space: Option<FiniteSpace> = space.map(read_json).transpose()?;
    if let Some(s) = &space {
        if s.size() != b.size() {
            return Err(Error::SpaceMismatch { left: s.size(), right: b.size() }.into());
        }
    }
    let e = parse_indices(set, b.size())?;
    let mut components: Vec<ElementSet> = if e.is_empty() { Vec::new() } else { vec![e.clone()] };
    for u in b.elements() {
        let pieces = chain_components(&e, &u.symmetrize())?;
        components = components
            .iter()
            .flat_map(|c| pieces.iter().map(move |p| c.intersection(p)))
            .filter(|c| !c.is_empty())
            .collect();
    }
    let verdict = is_chain_connected(&e, &b);
    let mut value = json!({
        "set": e.to_vec(),
        "connected": verdict.connected,
        "components": sets(&components),
        "witness": verdict.witness.map(|w| json!({
            "element": w.element,
            "relation": w.relation,
            "split": [w.split.0.to_vec(), w.split.1.to_vec()],
        })),
    });
    if let Some(s) = &space {
        let names = |c: &ElementSet| c.iter().map(|i| s.label(i)).collect::<Vec<_>>();
        let mut sorted = components.clone();
        sorted.sort();
        value["component_labels"] = json!(sorted.iter().map(names).collect::<Vec<_>>());
    }
    Ok(Report::ok(value))
}

fn group(cmd: &GroupCommand) -> Res<Report> {
    match cmd {
        GroupCommand::Analyze { group, subset } => {
            let g: FiniteGroup = read_json(group)?;
            let a = parse_indices(subset, g.size())?;
            let (al, ar) = (relation_left(&g, &a)?, relation_right(&g, &a)?);
            let generated = generated_subgroup(&g, &a)?;
            Ok(Report::ok(json!({
                "subset": a.to_vec(),
                "labels": a.iter().map(|i| g.elements()[i].clone()).collect::<Vec<_>>(),
                "subgroup": subgroup_check(&g, &a)?,
                "left_relation": invariance(&al, &g)?,
                "right_relation": invariance(&ar, &g)?,
                "left_equals_right": al == ar,
                "generated_subgroup": generated.subgroup.to_vec(),
            })))
        }
        GroupCommand::Tau { group, subgroups } => {
            let g: FiniteGroup = read_json(group)?;
            let lists: Vec<Vec<usize>> = read_json(subgroups)?;
            let family = lists
                .iter()
                .map(|l| ElementSet::from_indices(g.size(), l.iter().copied()))
                .collect::<Result<Vec<_>, Error>>()?;
            check_cap(g.size())?;
            let t = tau_from_subgroups(&g, &family)?;
            Ok(Report::ok(json!({
                "open_count": t.opens().len(),
                "opens": sets(t.opens()),
                "hausdorff": hausdorff_check(&g, &family)?,
            })))
        }
    }
}

fn absval_check(kind: KindArg, p: Option<u64>, height: u64, level: Option<&str>, power: &str) -> Res<Report> {
    let kind = match (kind, p) {
        (KindArg::Padic, Some(p)) => AbsKind::PAdic(p),
        (KindArg::Padic, None) => return Err(Failure("--p is required for --kind padic".into())),
        (_, Some(_)) => return Err(Failure("--p only applies to --kind padic".into())),
        (KindArg::Trivial, None) => AbsKind::Trivial,
        (KindArg::Standard, None) => AbsKind::Standard,
    };
    if height == 0 {
        return Err(Failure("--height must be positive".into()));
    }
    let av = AbsoluteValue::new(kind, parse_rational(power)?)?;
    let level = match level {
        Some(s) => QParam::parse(s)?,
        None if av.is_ultrametric() => QParam::Inf,
        None => QParam::one(),
    };
    let samples = farey_samples(height);
    let report = validate_absolute_value(&av, &level, &samples)?;
    Ok(Report {
        violated: !report.valid(),
        value: json!({
            "absolute_value": av,
            "level": report.level,
            "samples": samples.len(),
            "pairs_checked": report.pairs_checked,
            "valid": report.valid(),
            "violations": report.violations,
        }),
    })
}
