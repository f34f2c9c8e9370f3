//! Seeded property sweeps: generate random instances, run the library, and
//! compare against the brute-force oracles in [`crate::checker`].
//!
//! Reports contain no timings or addresses, so a rerun with the same
//! configuration serializes to the same bytes.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;
use unilab_core::connectivity::{dim0_report, is_chain_connected, separated_split};
use unilab_core::exact::{int, rat};
use unilab_core::groups::{
    all_subgroups, generated_subgroup, left_core, left_uniformity_base, relation_left, relation_right, subgroup_check,
};
use unilab_core::random::{partition_from_labels, Gen};
use unilab_core::scalars::{farey_samples, is_archimedean, padic_valuation, AbsoluteValue, Archimedean};
use unilab_core::{ElementSet, FiniteGroup, Relation, UniformityBase};

use crate::checker;

pub const SUITES: &[&str] =
    &["relation-algebra", "entourage", "topology", "chain-duality", "ucont", "dim0", "padic", "groups"];

pub const MAX_SWEEP_SIZE: usize = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("{0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub seed: u64,
    pub instance_count: usize,
    pub max_size: usize,
    pub suites: Vec<String>,
}

impl SweepConfig {
    /// An empty suite list selects every suite.
    pub fn new(seed: u64, instance_count: usize, max_size: usize, suites: Vec<String>) -> Result<Self, SweepError> {
        if instance_count == 0 {
            return Err(SweepError::InvalidConfig("instance count must be positive".into()));
        }
        if !(1..=MAX_SWEEP_SIZE).contains(&max_size) {
            return Err(SweepError::InvalidConfig(format!("max size must be in 1..={MAX_SWEEP_SIZE}")));
        }
        if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
            return Err(SweepError::UnknownSuite(bad.clone()));
        }
        let mut suites = if suites.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { suites };
        suites.sort();
        suites.dedup();
        Ok(SweepConfig { seed, instance_count, max_size, suites })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: usize,
    pub first_counterexample: Option<Value>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "instances": self.instances,
            "passed": self.passed,
            "failed": self.failed,
            "checks": self.checks,
            "first_counterexample": self.first_counterexample,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub suites: BTreeMap<String, SuiteReport>,
}

impl SweepReport {
    pub fn all_passed(&self) -> bool {
        self.suites.values().all(SuiteReport::ok)
    }

    pub fn to_json(&self) -> Value {
        let suites: serde_json::Map<String, Value> =
            self.suites.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        json!({
            "seed": self.config.seed,
            "instance_count": self.config.instance_count,
            "max_size": self.config.max_size,
            "suites": suites,
            "all_passed": self.all_passed(),
        })
    }
}

pub fn sweep(config: &SweepConfig) -> SweepReport {
    let suites = config
        .suites
        .iter()
        .map(|name| {
            let report = run_suite(name, config.seed, config.instance_count, config.max_size)
                .expect("suite names validated by SweepConfig");
            (name.clone(), report)
        })
        .collect();
    SweepReport { config: config.clone(), suites }
}

/// Per-suite seed, so a suite's instances do not depend on which other
/// suites were selected.
fn suite_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a
    let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    seed ^ h
}

pub fn run_suite(name: &str, seed: u64, instances: usize, max_size: usize) -> Result<SuiteReport, SweepError> {
    let mut gen = Gen::new(suite_seed(seed, name));
    let mut t = Tally::default();
    let max_size = max_size.clamp(1, MAX_SWEEP_SIZE);
    match name {
        "relation-algebra" => (0..instances).for_each(|_| relation_algebra(&mut gen, &mut t, max_size)),
        "entourage" => (0..instances).for_each(|_| entourage(&mut gen, &mut t, max_size)),
        "topology" => (0..instances).for_each(|_| topology(&mut gen, &mut t, max_size.min(5))),
        "chain-duality" => (0..instances).for_each(|_| chain_duality(&mut gen, &mut t, max_size.min(4))),
        "ucont" => (0..instances).for_each(|_| ucont(&mut gen, &mut t, max_size.min(5))),
        "dim0" => (0..instances).for_each(|_| dim0(&mut gen, &mut t, max_size)),
        "padic" => padic(&mut t),
        "groups" => groups(&mut gen, &mut t, instances),
        other => return Err(SweepError::UnknownSuite(other.to_string())),
    }
    Ok(t.finish())
}

#[derive(Default)]
struct Tally {
    instances: usize,
    failed_instances: usize,
    checks: usize,
    current_failed: bool,
    first: Option<Value>,
}

impl Tally {
    fn begin(&mut self) {
        self.instances += 1;
        self.current_failed = false;
    }

    fn end(&mut self) {
        if self.current_failed {
            self.failed_instances += 1;
        }
    }

    fn check(&mut self, ok: bool, property: &str, instance: impl FnOnce() -> Value) {
        self.checks += 1;
        if !ok {
            self.current_failed = true;
            if self.first.is_none() {
                self.first = Some(json!({ "property": property, "instance": instance() }));
            }
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            instances: self.instances,
            passed: self.instances - self.failed_instances,
            failed: self.failed_instances,
            checks: self.checks,
            first_counterexample: self.first,
        }
    }
}

fn js<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("domain objects serialize")
}

fn relation_algebra(gen: &mut Gen, t: &mut Tally, max: usize) {
    t.begin();
    let n = gen.size(max);
    let (u, v, w) = (gen.relation(n), gen.relation(n), gen.relation(n));
    let a = gen.subset(n);
    let ctx = || json!({ "u": js(&u), "v": js(&v), "w": js(&w), "a": js(&a) });
    let uv = u.compose(&v).expect("same carrier");
    t.check(uv == checker::compose(&u, &v), "compose matches definition", ctx);
    let assoc = uv.compose(&w).expect("same carrier") == u.compose(&v.compose(&w).expect("same carrier")).expect("same carrier");
    t.check(assoc, "compose is associative", ctx);
    let d = Relation::diagonal(n);
    t.check(u.compose(&d).ok() == Some(u.clone()) && d.compose(&u).ok() == Some(u.clone()), "diagonal is the identity", ctx);
    let lhs = uv.image(&a).expect("same carrier");
    let rhs = v.image(&u.image(&a).expect("same carrier")).expect("same carrier");
    t.check(lhs == rhs && lhs == checker::image(&uv, &a), "image of a composition", ctx);
    t.check(u.inverse().inverse() == u, "inverse is an involution", ctx);
    t.check(uv.inverse() == v.inverse().compose(&u.inverse()).expect("same carrier"), "inverse reverses composition", ctx);
    t.end();
}

fn entourage(gen: &mut Gen, t: &mut Tally, max: usize) {
    t.begin();
    let n = gen.size(max);
    let d = gen.semimetric(n);
    let radii = d.canonical_radii();
    for _ in 0..5 {
        let pick = |gen: &mut Gen| {
            if gen.coin() {
                radii[gen.below(radii.len())].clone()
            } else {
                gen.rational(8).abs() + rat(1, 5)
            }
        };
        let (r1, r2) = (pick(gen), pick(gen));
        let ctx = || json!({ "metric": js(&d), "r1": r1.to_string(), "r2": r2.to_string() });
        let e1 = d.entourage(&r1);
        let direct = Relation::from_fn(n, |x, y| d.get(x, y) < &r1);
        t.check(e1 == direct, "entourage matches definition", ctx);
        let lhs = e1.compose(&d.entourage(&r2)).expect("same carrier");
        t.check(lhs.is_subset(&d.entourage(&(&r1 + &r2))), "U(r1) * U(r2) within U(r1 + r2)", ctx);
    }
    let u = gen.ultrametric(n);
    let ctx = || json!({ "ultrametric": js(&u) });
    let mut radii = u.canonical_radii();
    radii.push(rat(1, 1000));
    for r in &radii {
        t.check(checker::is_equivalence(&u.entourage(r)), "ultrametric entourage is an equivalence", ctx);
        t.check(checker::is_equivalence(&u.closed_entourage(r)), "closed ultrametric entourage is an equivalence", ctx);
        let balls: Vec<ElementSet> = (0..n).map(|x| u.ball(x, r, false).expect("in range")).collect();
        let partition = balls.iter().all(|a| balls.iter().all(|b| a == b || a.is_disjoint(b)))
            && balls.iter().fold(ElementSet::empty(n), |acc, b| acc.union(b)).is_full();
        t.check(partition, "balls of one radius partition the carrier", ctx);
    }
    t.end();
}

fn topology(gen: &mut Gen, t: &mut Tally, max: usize) {
    t.begin();
    let n = gen.size(max);
    let b = gen.base(n);
    let ctx = || json!({ "base": js(&b) });
    let opens = checker::opens(&b);
    let top = b.topology().expect("small carrier");
    let mut lib_opens = top.opens().to_vec();
    lib_opens.sort();
    let mut oracle_opens = opens.clone();
    oracle_opens.sort();
    t.check(lib_opens == oracle_opens, "open sets match definition", ctx);
    for a in ElementSet::all_subsets(n) {
        let ctx = || json!({ "base": js(&b), "set": js(&a) });
        t.check(b.closure(&a) == checker::closure(&opens, &a), "closure is the intersection of V[A]", ctx);
        t.check(b.interior(&a) == checker::interior(&opens, &a), "A_0 is the interior", ctx);
    }
    let meet = b.elements().iter().fold(Relation::full(n), |acc, u| acc.intersection(u).expect("same carrier"));
    let hausdorff = checker::hausdorff(&opens, n);
    t.check(b.is_hausdorff() == hausdorff, "library Hausdorff test", ctx);
    t.check(hausdorff == (meet == Relation::diagonal(n)), "Hausdorff iff base meets in the diagonal", ctx);
    t.end();
}

fn chain_duality(gen: &mut Gen, t: &mut Tally, max: usize) {
    t.begin();
    for n in 1..=max {
        let b = gen.base(n);
        let opens = checker::opens(&b);
        for e in ElementSet::all_subsets(n) {
            let ctx = || json!({ "base": js(&b), "set": js(&e) });
            let cc = is_chain_connected(&e, &b).connected;
            let split = separated_split(&e, &b);
            t.check(cc == split.is_none(), "chain connected iff no separated split", ctx);
            if let Some((a, c)) = &split {
                let valid = !a.is_empty()
                    && !c.is_empty()
                    && a.is_disjoint(c)
                    && a.union(c) == e
                    && b.elements().iter().any(|u| checker::image(u, a).is_disjoint(c));
                t.check(valid, "split is a uniformly separated partition", ctx);
            }
            let closed = checker::closure(&opens, &e);
            t.check(cc == is_chain_connected(&closed, &b).connected, "closure preserves chain connectedness", ctx);
            let connected = checker::connected(&opens, &e);
            t.check(!connected || cc, "connected implies chain connected", ctx);
            t.check(connected == cc, "chain connected implies connected on finite carriers", ctx);
        }
    }
    t.end();
}

fn random_map(gen: &mut Gen, n: usize, m: usize) -> Vec<usize> {
    match gen.below(4) {
        0 => vec![gen.below(m); n],
        _ => gen.map(n, m),
    }
}

fn ucont(gen: &mut Gen, t: &mut Tally, max: usize) {
    t.begin();
    let (nx, ny, nz) = (gen.size(max), gen.size(max), gen.size(max));
    let (bx, by, bz) = (gen.base(nx), gen.base(ny), gen.base(nz));
    let (f, h) = (random_map(gen, nx, ny), random_map(gen, ny, nz));
    let ctx = || json!({ "source": js(&bx), "middle": js(&by), "target": js(&bz), "f": f, "g": h });
    let (ox, oy, oz) = (checker::opens(&bx), checker::opens(&by), checker::opens(&bz));
    let uc_f = checker::uniformly_continuous(&bx, &f, &by);
    let uc_h = checker::uniformly_continuous(&by, &h, &bz);
    let lib = bx.uniformly_continuous(&f, &by).expect("valid map").uniformly_continuous;
    t.check(lib == uc_f, "uniform continuity matches definition", ctx);
    let cont_f = checker::continuous(&ox, &f, &oy);
    t.check(bx.continuous(&f, &by).expect("valid map") == cont_f, "continuity matches definition", ctx);
    t.check(!cont_f || uc_f, "continuous on a compact space implies uniformly continuous", ctx);
    t.check(!checker::continuous(&oy, &h, &oz) || uc_h, "continuous on a compact space implies uniformly continuous", ctx);
    let hf: Vec<usize> = f.iter().map(|&y| h[y]).collect();
    t.check(!(uc_f && uc_h) || checker::uniformly_continuous(&bx, &hf, &bz), "composition of uniformly continuous maps", ctx);
    let id: Vec<usize> = (0..nx).collect();
    t.check(bx.uniformly_continuous(&id, &bx).expect("valid map").uniformly_continuous, "identity is uniformly continuous", ctx);
    t.end();
}

/// Every partition of `0..n`, via restricted growth strings.
fn all_partitions(n: usize) -> Vec<Relation> {
    fn go(n: usize, labels: &mut Vec<usize>, out: &mut Vec<Relation>) {
        if labels.len() == n {
            out.push(partition_from_labels(labels).to_relation());
            return;
        }
        let next = labels.iter().max().map_or(0, |m| m + 1);
        for l in 0..=next {
            labels.push(l);
            go(n, labels, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

fn dim0(gen: &mut Gen, t: &mut Tally, max: usize) {
    t.begin();
    let n = gen.size(max);
    let ultra = UniformityBase::from_semimetric(&gen.ultrametric(n));
    let ctx = || json!({ "base": js(&ultra) });
    let r = dim0_report(&ultra).expect("small carrier");
    t.check(r.uniformly_zero_dimensional, "ultrametric uniformity is uniformly 0-dimensional", ctx);
    t.check(r.implications_hold(), "dimension-0 implication chain", ctx);

    let b = gen.base(n);
    let ctx = || json!({ "base": js(&b) });
    let r = dim0_report(&b).expect("small carrier");
    t.check(r.implications_hold(), "dimension-0 implication chain", ctx);
    let eq = b.eq_base();
    for e in eq.elements() {
        t.check(checker::is_equivalence(e), "eq_base element is an equivalence", ctx);
        t.check(b.contains(e).expect("same carrier"), "eq_base element lies in the uniformity", ctx);
    }
    // every base element contains an equivalence relation of the uniformity
    let eqs: Vec<Relation> = all_partitions(n).into_iter().filter(|e| b.contains(e).expect("same carrier")).collect();
    let oracle = b.elements().iter().all(|u| eqs.iter().any(|e| e.is_subset(u)));
    t.check(oracle == r.uniformly_zero_dimensional, "uniformly 0-dimensional matches definition", ctx);
    t.end();
}

fn padic(t: &mut Tally) {
    let samples = farey_samples(20);
    let small: Vec<(i64, i64)> = samples
        .iter()
        .map(|x| (i64::try_from(x.numer()).expect("small"), i64::try_from(x.denom()).expect("small")))
        .collect();
    for p in [2u64, 3, 5, 7] {
        t.begin();
        let av = AbsoluteValue::padic(p).expect("prime");
        let values: Vec<_> = samples.iter().map(|x| av.eval(x).base).collect();
        let oracle_v = |(a, b): (i64, i64)| checker::valuation(p, a) - checker::valuation(p, b);
        for (x, &ab) in samples.iter().zip(&small) {
            if !x.is_zero() {
                let ok = padic_valuation(p, x).ok() == Some(oracle_v(ab));
                t.check(ok, "valuation matches factoring", || json!({ "p": p, "x": x.to_string() }));
            }
        }
        for (i, x) in samples.iter().enumerate() {
            for (j, y) in samples.iter().enumerate() {
                let ctx = || json!({ "p": p, "x": x.to_string(), "y": y.to_string() });
                let prod = av.eval(&(x * y)).base;
                t.check(prod == &values[i] * &values[j], "multiplicative", ctx);
                let sum = av.eval(&(x + y)).base;
                let m = values[i].clone().max(values[j].clone());
                t.check(sum <= m, "ultrametric inequality", ctx);
                if !x.is_zero() && !y.is_zero() && oracle_v(small[i]) != oracle_v(small[j]) {
                    t.check(sum == m, "equality when valuations differ", ctx);
                }
            }
        }
        let one = int(1);
        let bounded = (1..=10_000i64).all(|n| av.eval(&int(n)).base <= one);
        t.check(bounded, "|n·1| ≤ 1", || json!({ "p": p }));
        t.check(is_archimedean(&av, 100) == Archimedean::NonArchimedeanCertified, "p-adic is non-archimedean", || {
            json!({ "p": p })
        });
        t.end();
    }
    t.begin();
    let std = is_archimedean(&AbsoluteValue::standard(), 100);
    t.check(std == Archimedean::Archimedean { n0: 2 }, "standard is archimedean via 2", || json!({ "kind": "standard" }));
    t.end();
}

pub fn test_groups() -> Vec<(&'static str, FiniteGroup)> {
    vec![
        ("Z/6", FiniteGroup::cyclic(6)),
        ("Z/12", FiniteGroup::cyclic(12)),
        ("S3", FiniteGroup::symmetric(3)),
        ("S4", FiniteGroup::symmetric(4)),
        ("D4", FiniteGroup::dihedral(4)),
        ("Q8", FiniteGroup::quaternion()),
    ]
}

fn groups(gen: &mut Gen, t: &mut Tally, instances: usize) {
    for (name, g) in test_groups() {
        t.begin();
        let n = g.size();
        let subgroups = all_subgroups(&g);
        let mut candidates = subgroups.clone();
        for _ in 0..instances {
            let mut a = gen.subset(n);
            a.insert(g.identity());
            candidates.push(a);
        }
        for a in &candidates {
            let ctx = || json!({ "group": name, "subset": js(a) });
            let al = relation_left(&g, a).expect("same carrier");
            let sub = checker::is_subgroup(&g, a);
            t.check(checker::is_equivalence(&al) == sub, "A_L is an equivalence iff A is a subgroup", ctx);
            let rep = subgroup_check(&g, a).expect("same carrier");
            t.check(rep.is_subgroup == sub && rep.is_normal == checker::is_normal(&g, a), "subgroup report", ctx);
            if sub {
                let mut classes = al.equivalence_classes().expect("equivalence").blocks().to_vec();
                classes.sort();
                t.check(classes == checker::left_cosets(&g, a), "classes of A_L are left cosets", ctx);
                let same = al == relation_right(&g, a).expect("same carrier");
                t.check(same == checker::is_normal(&g, a), "A_L = A_R iff A is normal", ctx);
            }
        }
        for _ in 0..instances {
            let w = gen.subset(n);
            let ctx = || json!({ "group": name, "subset": js(&w) });
            let got = generated_subgroup(&g, &w).expect("same carrier").subgroup;
            t.check(got == checker::worklist_subgroup(&g, &w), "generated subgroup matches worklist closure", ctx);
        }
        for _ in 0..instances.min(20) {
            let w = subgroups[gen.below(subgroups.len())].clone();
            let base = left_uniformity_base(&g, &[w.clone()], false).expect("subgroup neighborhood").base;
            let mut u = relation_left(&g, &w).expect("same carrier");
            for _ in 0..n {
                u.insert(gen.below(n), gen.below(n));
            }
            let ctx = || json!({ "group": name, "neighborhood": js(&w), "u": js(&u) });
            let (core, _) = left_core(&u, &g).expect("same carrier");
            let wl = relation_left(&g, &w).expect("same carrier");
            t.check(base.contains(&core).expect("same carrier"), "left core stays in the left uniformity", ctx);
            t.check(wl.is_subset(&core) && core.is_subset(&u), "W_L within the core within U", ctx);
        }
        t.end();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_list_means_all() {
        let cfg = SweepConfig::new(3, 2, 4, Vec::new()).unwrap();
        let report = sweep(&cfg);
        assert_eq!(report.suites.len(), SUITES.len());
        assert!(report.all_passed());
    }

    #[test]
    fn unknown_suite_rejected() {
        assert!(matches!(SweepConfig::new(1, 1, 4, vec!["nope".into()]), Err(SweepError::UnknownSuite(_))));
        assert!(run_suite("nope", 1, 1, 4).is_err());
    }

    #[test]
    fn oversized_config_rejected() {
        assert!(SweepConfig::new(1, 1, MAX_SWEEP_SIZE + 1, Vec::new()).is_err());
    }

    #[test]
    fn same_seed_same_report() {
        let a = run_suite("entourage", 9, 10, 5).unwrap().to_json();
        let b = run_suite("entourage", 9, 10, 5).unwrap().to_json();
        assert_eq!(a, b);
    }
}
