//! Exact semimetrics, q-semimetrics and semi-ultrametrics on a finite
//! carrier, together with their entourages, balls and combinators.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, parse_rational, pow_le_sum, rational_pow, Rational};
use crate::relation::{check_map, check_size, Partition, Relation};
use crate::set::ElementSet;
use crate::{Error, Result};

/// The axiom level a distance matrix is claimed to satisfy: the
/// q-triangle inequality `d(x,z)^q ≤ d(x,y)^q + d(y,z)^q` for a positive
/// rational `q`, or the ultrametric inequality (`Inf`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QParam {
    Finite(Rational),
    Inf,
}

impl QParam {
    pub fn finite(q: Rational) -> Result<Self> {
        if q.is_positive() {
            Ok(QParam::Finite(q))
        } else {
            Err(Error::Parse(format!("level exponent must be positive, got {}", format_rational(&q))))
        }
    }

    /// The ordinary triangle inequality.
    pub fn one() -> Self {
        QParam::Finite(Rational::one())
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(QParam::Inf);
        }
        match s.strip_prefix("q:") {
            Some(q) => QParam::finite(parse_rational(q)?),
            None => Err(Error::Parse(format!("level must be \"inf\" or \"q:p/q\", got {s:?}"))),
        }
    }

    /// The weaker of two levels; a q′-semimetric is a q-semimetric for q ≤ q′.
    pub fn weaker(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl PartialOrd for QParam {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders levels by strength: `Finite(q) < Finite(q′)` for `q < q′`, and
/// `Inf` above all.
impl Ord for QParam {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (QParam::Inf, QParam::Inf) => Ordering::Equal,
            (QParam::Inf, _) => Ordering::Greater,
            (_, QParam::Inf) => Ordering::Less,
            (QParam::Finite(a), QParam::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QParam::Inf => f.write_str("inf"),
            QParam::Finite(q) => write!(f, "q:{}", format_rational(q)),
        }
    }
}

impl Serialize for QParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        QParam::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Nonnegative,
    ZeroDiagonal,
    Symmetry,
    /// The level inequality: triangle, q-triangle or ultrametric.
    Triangle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

/// Outcome of checking a matrix against the semimetric axioms at a level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricReport {
    pub level: QParam,
    /// First witness for each violated axiom, in axiom order.
    pub violations: Vec<Violation>,
    pub is_metric: bool,
}

impl MetricReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn level_holds(level: &QParam, xz: &Rational, xy: &Rational, yz: &Rational) -> bool {
    match level {
        QParam::Inf => xz <= xy.max(yz),
        QParam::Finite(q) if q.is_one() => xz <= &(xy + yz),
        QParam::Finite(q) => pow_le_sum(xz, xy, yz, q),
    }
}

/// Checks every axiom of a level-`level` semimetric, reporting a witness
/// for each one that fails. Comparisons are exact for every rational level.
pub fn validate(values: &[Vec<Rational>], level: &QParam) -> Result<MetricReport> {
    let n = values.len();
    if n == 0 || values.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch);
    }
    let mut found: Vec<Violation> = Vec::new();
    fn note(found: &mut Vec<Violation>, axiom: Axiom, witness: Vec<usize>) {
        if !found.iter().any(|v| v.axiom == axiom) {
            found.push(Violation { axiom, witness });
        }
    }
    for i in 0..n {
        if !values[i][i].is_zero() {
            note(&mut found, Axiom::ZeroDiagonal, vec![i]);
        }
        for j in 0..n {
            if values[i][j].is_negative() {
                note(&mut found, Axiom::Nonnegative, vec![i, j]);
            }
            if values[i][j] != values[j][i] {
                note(&mut found, Axiom::Symmetry, vec![i, j]);
            }
        }
    }
    let nonneg = !found.iter().any(|v| v.axiom == Axiom::Nonnegative);
    if nonneg {
        'outer: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !level_holds(level, &values[x][z], &values[x][y], &values[y][z]) {
                        note(&mut found, Axiom::Triangle, vec![x, y, z]);
                        break 'outer;
                    }
                }
            }
        }
    }
    found.sort_by_key(|v| v.axiom);
    let is_metric = (0..n).all(|i| (0..n).all(|j| i == j || values[i][j].is_positive()));
    Ok(MetricReport { level: level.clone(), violations: found, is_metric })
}

/// A validated semimetric with exact rational values.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SemiMetricJson", into = "SemiMetricJson")]
pub struct SemiMetric {
    n: usize,
    values: Vec<Rational>,
    level: QParam,
}

/// Wire form: `{"size": n, "level": "inf" | "q:p/q", "values": [["0","1/2"], ...]}`.
#[derive(Serialize, Deserialize)]
pub struct SemiMetricJson {
    pub size: usize,
    pub level: QParam,
    pub values: Vec<Vec<String>>,
}

impl TryFrom<SemiMetricJson> for SemiMetric {
    type Error = Error;
    fn try_from(j: SemiMetricJson) -> Result<Self> {
        let values = j
            .values
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if values.len() != j.size {
            return Err(Error::ShapeMismatch);
        }
        SemiMetric::new(values, j.level)
    }
}

impl From<SemiMetric> for SemiMetricJson {
    fn from(d: SemiMetric) -> Self {
        SemiMetricJson {
            size: d.n,
            values: d.rows().map(|row| row.iter().map(format_rational).collect()).collect(),
            level: d.level,
        }
    }
}

impl fmt::Debug for SemiMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SemiMetric[{}, {}]", self.n, self.level)?;
        f.debug_list().entries(self.rows().map(|r| r.iter().map(format_rational).collect::<Vec<_>>())).finish()
    }
}

impl SemiMetric {
    /// Validates `values` at `level`; fails with the full report otherwise.
    pub fn new(values: Vec<Vec<Rational>>, level: QParam) -> Result<Self> {
        let report = validate(&values, &level)?;
        check_size(values.len())?;
        if !report.valid() {
            return Err(Error::InvalidSemiMetric(Box::new(report)));
        }
        let n = values.len();
        Ok(SemiMetric { n, values: values.into_iter().flatten().collect(), level })
    }

    pub fn from_fn(n: usize, level: QParam, f: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect(), level)
    }

    pub fn zero(n: usize) -> Self {
        Self::from_fn(n, QParam::Inf, |_, _| Rational::zero()).expect("zero semimetric")
    }

    /// `d(x, y) = 1` for `x ≠ y`.
    pub fn discrete(n: usize) -> Self {
        Self::from_fn(n, QParam::Inf, |i, j| if i == j { Rational::zero() } else { Rational::one() })
            .expect("discrete metric")
    }

    /// The discrete semi-ultrametric of a partition: 0 inside blocks, 1 across.
    pub fn discrete_from_partition(p: &Partition) -> Self {
        let block = p.block_of();
        Self::from_fn(p.size(), QParam::Inf, |i, j| {
            if block[i] == block[j] {
                Rational::zero()
            } else {
                Rational::one()
            }
        })
        .expect("partition metrics are ultrametric")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> &QParam {
        &self.level
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.values.chunks(self.n)
    }

    pub fn to_matrix(&self) -> Vec<Vec<Rational>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn is_metric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_positive()))
    }

    /// Re-checks the matrix at another level.
    pub fn validate_at(&self, level: &QParam) -> MetricReport {
        validate(&self.to_matrix(), level).expect("square by construction")
    }

    pub fn max_value(&self) -> Rational {
        self.values.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// `U_d(r) = {(x, y) : d(x, y) < r}`. Empty when `r ≤ 0`.
    pub fn entourage(&self, r: &Rational) -> Relation {
        Relation::from_fn(self.n, |i, j| self.get(i, j) < r)
    }

    /// `{(x, y) : d(x, y) ≤ r}`.
    pub fn closed_entourage(&self, r: &Rational) -> Relation {
        Relation::from_fn(self.n, |i, j| self.get(i, j) <= r)
    }

    /// Open ball `{y : d(x, y) < r}` or closed ball `{y : d(x, y) ≤ r}`.
    pub fn ball(&self, center: usize, r: &Rational, closed: bool) -> Result<ElementSet> {
        if center >= self.n {
            return Err(Error::IndexOutOfRange { index: center, size: self.n });
        }
        let within = |y: usize| {
            let v = self.get(center, y);
            if closed {
                v <= r
            } else {
                v < r
            }
        };
        ElementSet::from_indices(self.n, (0..self.n).filter(|&y| within(y)))
    }

    /// The sorted distinct positive values plus one radius above the
    /// maximum. `U_d(r)` is constant between consecutive entries, so these
    /// radii enumerate every distinct entourage.
    pub fn canonical_radii(&self) -> Vec<Rational> {
        let mut vals: Vec<Rational> = self.values.iter().filter(|v| v.is_positive()).cloned().collect();
        vals.sort();
        vals.dedup();
        vals.push(self.max_value() + Rational::one());
        vals
    }

    /// `d_t(x, y) = min(d(x, y), t)`.
    pub fn truncate(&self, t: &Rational) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::Parse("truncation bound must be positive".into()));
        }
        Self::from_fn(self.n, self.level.clone(), |i, j| self.get(i, j).min(t).clone())
    }

    /// Pointwise `d^q`. A q′-semimetric becomes a (q′/q)-semimetric.
    pub fn power_transform(&self, q: &Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InexactPower(format_rational(q)));
        }
        let mut values = Vec::with_capacity(self.n);
        for row in self.rows() {
            let r = row
                .iter()
                .map(|v| rational_pow(v, q).ok_or_else(|| Error::InexactPower(format_rational(q))))
                .collect::<Result<Vec<_>>>()?;
            values.push(r);
        }
        let level = match &self.level {
            QParam::Inf => QParam::Inf,
            QParam::Finite(l) => QParam::Finite(l / q),
        };
        Self::new(values, level)
    }

    /// `d_X(x, x') = d_Y(f(x), f(x'))` on a carrier of size `f.len()`.
    pub fn pullback(&self, f: &[usize]) -> Result<Self> {
        check_map(f, self.n)?;
        check_size(f.len())?;
        Self::from_fn(f.len(), self.level.clone(), |i, j| self.get(f[i], f[j]).clone())
    }
}

fn common_space(ds: &[SemiMetric]) -> Result<usize> {
    let n = ds.first().ok_or(Error::EmptyList)?.size();
    match ds.iter().find(|d| d.size() != n) {
        Some(d) => Err(Error::SpaceMismatch { left: n, right: d.size() }),
        None => Ok(n),
    }
}

/// Pointwise maximum; the level is the weakest input level.
pub fn max_combine(ds: &[SemiMetric]) -> Result<SemiMetric> {
    let n = common_space(ds)?;
    let level = ds.iter().map(|d| d.level.clone()).min().expect("nonempty");
    SemiMetric::from_fn(n, level, |i, j| ds.iter().map(|d| d.get(i, j)).max().expect("nonempty").clone())
}

/// `d′ = max_j min(d_j, 1/j)` over the listed `d_1, .., d_m`.
///
/// For any later index `j > m` the truncated term is bounded by `1/j`,
/// so once `m ≥ ⌈1/s⌉` where `s` is the smallest positive entry of the
/// result, appending further semimetrics cannot raise a nonzero entry;
/// [`sequence_exactness_index`] reports that `m`.
pub fn sequence_combine(n: usize, ds: &[SemiMetric]) -> Result<SemiMetric> {
    if ds.is_empty() {
        check_size(n)?;
        return Ok(SemiMetric::zero(n));
    }
    let m = common_space(ds)?;
    if m != n {
        return Err(Error::SpaceMismatch { left: n, right: m });
    }
    let truncated = ds
        .iter()
        .enumerate()
        .map(|(k, d)| d.truncate(&Rational::new(1.into(), (k as i64 + 1).into())))
        .collect::<Result<Vec<_>>>()?;
    max_combine(&truncated)
}

/// `⌈1/s⌉` for the smallest positive entry `s`, or 1 for the zero semimetric.
pub fn sequence_exactness_index(d: &SemiMetric) -> usize {
    let min_pos = d.values.iter().filter(|v| v.is_positive()).min();
    match min_pos {
        Some(s) => {
            let c = s.recip().ceil().to_integer();
            c.try_into().unwrap_or(usize::MAX)
        }
        None => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    // Random semimetric: shortest-path closure of a random symmetric weight matrix.
    fn arb_semimetric(max: usize) -> impl Strategy<Value = SemiMetric> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(0i64..12, n * n).prop_map(move |w| {
                let mut d: Vec<Vec<Rational>> = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { int(0) } else { rat(w[i.min(j) * n + i.max(j)], 2) }).collect())
                    .collect();
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let via = &d[i][k] + &d[k][j];
                            if via < d[i][j] {
                                d[i][j] = via;
                            }
                        }
                    }
                }
                SemiMetric::new(d, QParam::one()).unwrap()
            })
        })
    }

    // Random ultrametric from nested partitions with decreasing radii.
    fn arb_ultrametric(max: usize) -> impl Strategy<Value = SemiMetric> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(0usize..3, n * 3).prop_map(move |labels| {
                // level 3 coarsest split, level 1 finest
                SemiMetric::from_fn(n, QParam::Inf, |i, j| {
                    let mut d = int(0);
                    for lvl in 0..3 {
                        let key = |x: usize| labels[x * 3..x * 3 + lvl + 1].to_vec();
                        if key(i) != key(j) {
                            d = int(3 - lvl as i64);
                            break;
                        }
                    }
                    d
                })
                .unwrap()
            })
        })
    }

    #[test]
    fn validate_examples() {
        let disc = SemiMetric::discrete(4);
        let r = disc.validate_at(&QParam::Inf);
        assert!(r.valid() && r.is_metric);
        let z = validate(&m(&[&[0, 0], &[0, 0]]), &QParam::one()).unwrap();
        assert!(z.valid() && !z.is_metric);
        let z = validate(&m(&[&[0, 0], &[0, 0]]), &QParam::Inf).unwrap();
        assert!(z.valid());
        let bad = validate(&m(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]]), &QParam::one()).unwrap();
        assert_eq!(bad.violations, vec![Violation { axiom: Axiom::Triangle, witness: vec![0, 1, 2] }]);
        assert_eq!(validate(&m(&[&[0, 1]]), &QParam::one()), Err(Error::ShapeMismatch));
        let asym = validate(&m(&[&[1, 2], &[3, 0]]), &QParam::one()).unwrap();
        let axioms: Vec<Axiom> = asym.violations.iter().map(|v| v.axiom).collect();
        assert_eq!(axioms, vec![Axiom::ZeroDiagonal, Axiom::Symmetry]);
        let neg = validate(&m(&[&[0, -1], &[-1, 0]]), &QParam::Inf).unwrap();
        assert_eq!(neg.violations[0].axiom, Axiom::Nonnegative);
    }

    #[test]
    fn fractional_level_is_exact() {
        // sqrt: 18^(1/2) = 2^(1/2) + 8^(1/2) exactly
        let vals = m(&[&[0, 2, 18], &[2, 0, 8], &[18, 8, 0]]);
        assert!(validate(&vals, &QParam::Finite(rat(1, 2))).unwrap().valid());
        assert!(!validate(&vals, &QParam::one()).unwrap().valid());
        let vals = m(&[&[0, 2, 19], &[2, 0, 8], &[19, 8, 0]]);
        assert!(!validate(&vals, &QParam::Finite(rat(1, 2))).unwrap().valid());
    }

    #[test]
    fn level_json_forms() {
        assert_eq!(QParam::parse("inf").unwrap(), QParam::Inf);
        assert_eq!(QParam::parse("q:2/4").unwrap(), QParam::Finite(rat(1, 2)));
        assert_eq!(QParam::Finite(int(1)).to_string(), "q:1");
        assert!(QParam::parse("q:0").is_err());
        assert!(QParam::parse("q:-1").is_err());
        let d = SemiMetric::discrete_from_partition(&Partition::from_lists(3, &[vec![0, 1], vec![2]]).unwrap());
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"size":3,"level":"inf","values":[["0","0","1"],["0","0","1"],["1","1","0"]]}"#);
        let back: SemiMetric = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"size":3,"level":"q:1","values":[["0","1","5"],["1","0","1"],["5","1","0"]]}"#;
        assert!(serde_json::from_str::<SemiMetric>(bad).is_err());
    }

    #[test]
    fn entourage_and_ball_examples() {
        let disc = SemiMetric::discrete(4);
        assert_eq!(disc.entourage(&rat(1, 2)), Relation::diagonal(4));
        assert_eq!(disc.entourage(&int(2)), Relation::full(4));
        assert_eq!(disc.ball(2, &int(1), false).unwrap().to_vec(), vec![2]);
        assert_eq!(disc.ball(2, &int(0), true).unwrap().to_vec(), vec![2]);
        assert!(disc.ball(9, &int(1), false).is_err());
        let z = SemiMetric::zero(3);
        assert_eq!(z.ball(0, &int(0), true).unwrap().len(), 3);
        assert_eq!(z.canonical_radii(), vec![int(1)]);
        assert_eq!(disc.canonical_radii(), vec![int(1), int(2)]);
    }

    #[test]
    fn truncate_examples() {
        let d = SemiMetric::discrete(3);
        assert_eq!(d.truncate(&int(5)).unwrap(), d);
        let t = d.truncate(&rat(1, 2)).unwrap();
        assert_eq!(t.get(0, 1), &rat(1, 2));
        assert_eq!(t.get(1, 1), &int(0));
    }

    #[test]
    fn combinator_examples() {
        let d = SemiMetric::discrete(3);
        assert_eq!(max_combine(std::slice::from_ref(&d)).unwrap(), d);
        assert_eq!(max_combine(&[d.clone(), d.clone()]).unwrap(), d);
        assert_eq!(max_combine(&[]), Err(Error::EmptyList));
        assert!(matches!(max_combine(&[d.clone(), SemiMetric::discrete(2)]), Err(Error::SpaceMismatch { .. })));
        assert_eq!(sequence_combine(3, &[]).unwrap(), SemiMetric::zero(3));
        assert_eq!(sequence_combine(3, std::slice::from_ref(&d)).unwrap(), d);
        let half = SemiMetric::from_fn(2, QParam::one(), |i, j| if i == j { int(0) } else { rat(1, 2) }).unwrap();
        assert_eq!(sequence_exactness_index(&half), 2);
        assert_eq!(sequence_exactness_index(&SemiMetric::zero(2)), 1);
    }

    #[test]
    fn power_transform_examples() {
        let d = SemiMetric::discrete(3);
        assert_eq!(d.power_transform(&int(1)).unwrap(), d);
        assert_eq!(d.power_transform(&int(2)).unwrap(), d);
        let two = SemiMetric::from_fn(2, QParam::one(), |i, j| if i == j { int(0) } else { int(2) }).unwrap();
        assert!(matches!(two.power_transform(&rat(1, 2)), Err(Error::InexactPower(_))));
        // square roots of a semimetric with square entries form a 2-semimetric
        let sq = m(&[&[0, 9, 16], &[9, 0, 25], &[16, 25, 0]]);
        let roots = m(&[&[0, 3, 4], &[3, 0, 5], &[4, 5, 0]]);
        assert!(validate(&sq, &QParam::one()).unwrap().valid());
        let d2 = SemiMetric::new(roots, QParam::Finite(int(2))).unwrap();
        let back = d2.power_transform(&int(2)).unwrap();
        assert_eq!(back.level(), &QParam::one());
        assert_eq!(back.to_matrix(), sq);
        for r in [int(3), int(4), int(5), int(6)] {
            assert_eq!(back.entourage(&(&r * &r)), d2.entourage(&r));
        }
    }

    #[test]
    fn pullback_examples() {
        let d = SemiMetric::discrete(3);
        assert_eq!(d.pullback(&[0, 1, 2]).unwrap(), d);
        assert_eq!(d.pullback(&[1, 1]).unwrap(), SemiMetric::zero(2));
        assert!(matches!(d.pullback(&[0, 3]), Err(Error::MapOutOfRange { .. })));
    }

    #[test]
    fn partition_metric_examples() {
        assert_eq!(SemiMetric::discrete_from_partition(&Partition::singletons(4)), SemiMetric::discrete(4));
        let one = Partition::from_lists(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(SemiMetric::discrete_from_partition(&one), SemiMetric::zero(3));
        let p = Partition::from_lists(3, &[vec![0, 1], vec![2]]).unwrap();
        let e = SemiMetric::discrete_from_partition(&p).entourage(&rat(1, 2));
        assert_eq!(e.equivalence_classes().unwrap().to_lists(), vec![vec![0, 1], vec![2]]);
        assert_eq!(e, p.to_relation());
    }

    proptest! {
        #[test]
        fn entourage_composition_bound(d in arb_semimetric(6), a in 1i64..14, b in 1i64..14) {
            let (r1, r2) = (rat(a, 4), rat(b, 4));
            let lhs = d.entourage(&r1).compose(&d.entourage(&r2)).unwrap();
            prop_assert!(lhs.is_subset(&d.entourage(&(&r1 + &r2))));
            prop_assert!(d.entourage(&r1).is_subset(&d.entourage(&(&r1 + &r2))));
            let e = d.entourage(&r1);
            prop_assert!(e.is_reflexive() && e.is_symmetric());
            for x in 0..d.size() {
                prop_assert_eq!(d.ball(x, &r1, false).unwrap(), e.row(x));
            }
        }

        #[test]
        fn ultrametric_structure(d in arb_ultrametric(6)) {
            for r in d.canonical_radii() {
                prop_assert!(d.entourage(&r).classify().is_equivalence);
                prop_assert!(d.closed_entourage(&r).classify().is_equivalence);
                let balls: Vec<ElementSet> = (0..d.size()).map(|x| d.ball(x, &r, false).unwrap()).collect();
                for a in &balls {
                    for b in &balls {
                        prop_assert!(a == b || a.is_disjoint(b));
                    }
                }
                for x in 0..d.size() {
                    for y in 0..d.size() {
                        if d.get(x, y) < &r {
                            prop_assert_eq!(&balls[x], &balls[y]);
                        }
                    }
                }
            }
            prop_assert!(d.closed_entourage(&int(0)).classify().is_equivalence);
        }

        #[test]
        fn level_monotonicity(d in arb_ultrametric(5), num in 1i64..7, den in 1i64..4) {
            let q = rat(num, den);
            prop_assert!(d.validate_at(&QParam::Finite(q.clone())).valid());
            prop_assert!(d.validate_at(&QParam::Finite(q / int(2))).valid());
        }

        #[test]
        fn q_levels_nest(d in arb_semimetric(5), num in 1i64..4, den in 1i64..4) {
            // a 1-semimetric is a q-semimetric for every q ≤ 1
            let q = rat(num, den).min(int(1));
            prop_assert!(d.validate_at(&QParam::Finite(q)).valid());
        }

        #[test]
        fn zero_one_matrices_are_ultrametric(n in 1usize..6, bits in any::<u64>()) {
            let vals: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n).map(|j| {
                    let (a, b) = (i.min(j), i.max(j));
                    if a == b { int(0) } else { int((bits >> (a * n + b) & 1) as i64) }
                }).collect())
                .collect();
            // a {0,1}-valued semimetric is automatically ultrametric
            if validate(&vals, &QParam::one()).unwrap().valid() {
                prop_assert!(validate(&vals, &QParam::Inf).unwrap().valid());
            }
        }

        #[test]
        fn truncation_entourages(d in arb_semimetric(5), t in 1i64..10, r in 1i64..12) {
            let (t, r) = (rat(t, 2), rat(r, 2));
            let dt = d.truncate(&t).unwrap();
            if r <= t {
                prop_assert_eq!(dt.entourage(&r), d.entourage(&r));
            } else {
                prop_assert_eq!(dt.entourage(&r), Relation::full(d.size()));
            }
        }

        #[test]
        fn max_combine_entourages(a in arb_ultrametric(5), bseed in any::<u64>(), r in 1i64..5) {
            let n = a.size();
            let labels: Vec<usize> = (0..n).map(|i| (bseed >> (2 * i) & 3) as usize).collect();
            let b = SemiMetric::discrete_from_partition(&crate::random::partition_from_labels(&labels));
            let m = max_combine(&[a.clone(), b.clone()]).unwrap();
            prop_assert!(m.validate_at(&QParam::Inf).valid());
            let r = int(r);
            prop_assert_eq!(m.entourage(&r), a.entourage(&r).intersection(&b.entourage(&r)).unwrap());
        }

        #[test]
        fn sequence_entourages(ds in proptest::collection::vec(arb_semimetric(4), 3), k in 1i64..4) {
            let n = ds[0].size();
            let ds: Vec<SemiMetric> = ds.into_iter().filter(|d| d.size() == n).collect();
            let dp = sequence_combine(n, &ds).unwrap();
            prop_assert!(dp.max_value() <= int(1));
            let r = rat(1, k);
            let mut expect = Relation::full(n);
            for d in ds.iter().take(k as usize) {
                expect = expect.intersection(&d.entourage(&r)).unwrap();
            }
            prop_assert_eq!(dp.entourage(&r), expect);
            prop_assert_eq!(dp.entourage(&rat(3, 2)), Relation::full(n));
        }

        #[test]
        fn pullback_entourages(d in arb_ultrametric(5), f in proptest::collection::vec(0usize..5, 1..6)) {
            let f: Vec<usize> = f.into_iter().map(|y| y % d.size()).collect();
            let p = d.pullback(&f).unwrap();
            prop_assert_eq!(p.level(), &QParam::Inf);
            for r in d.canonical_radii() {
                prop_assert_eq!(p.entourage(&r), d.entourage(&r).preimage(&f).unwrap());
            }
        }
    }
}
