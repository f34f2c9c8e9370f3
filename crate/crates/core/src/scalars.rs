//! Absolute values on the rationals and ultranorms on `Q^n`.
//!
//! Every absolute value here has the shape `|x| = base(x)^t` with `base`
//! one of the trivial, p-adic or standard absolute values and `t > 0` a
//! rational power. Values are kept as `(base, t)` pairs, so no irrational
//! number is ever approximated: two values with the same power compare by
//! their bases, mixed powers compare by cross-powering, and the level
//! inequality `|x+y|^q ≤ |x|^q + |y|^q` is decided by [`pow_le_sum`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exact::{cmp_powers, format_rational, int, pow_le_sum, pow_int, rational_pow, Rational};
use crate::metrics::{QParam, SemiMetric};
use crate::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsKind {
    Trivial,
    PAdic(u64),
    Standard,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsoluteValue {
    kind: AbsKind,
    #[serde(serialize_with = "ser_rational")]
    power: Rational,
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

impl AbsoluteValue {
    pub fn new(kind: AbsKind, power: Rational) -> Result<Self> {
        if let AbsKind::PAdic(p) = kind {
            if !is_prime(p) {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
        }
        if !power.is_positive() {
            return Err(Error::Parse("power must be positive".into()));
        }
        Ok(AbsoluteValue { kind, power })
    }

    pub fn trivial() -> Self {
        AbsoluteValue { kind: AbsKind::Trivial, power: Rational::one() }
    }

    pub fn padic(p: u64) -> Result<Self> {
        Self::new(AbsKind::PAdic(p), Rational::one())
    }

    pub fn standard() -> Self {
        AbsoluteValue { kind: AbsKind::Standard, power: Rational::one() }
    }

    pub fn kind(&self) -> AbsKind {
        self.kind
    }

    pub fn power(&self) -> &Rational {
        &self.power
    }

    /// Trivial and p-adic absolute values satisfy the ultrametric inequality
    /// for every power.
    pub fn is_ultrametric(&self) -> bool {
        !matches!(self.kind, AbsKind::Standard)
    }

    pub fn eval(&self, x: &Rational) -> AbsValue {
        let base = if x.is_zero() {
            Rational::zero()
        } else {
            match self.kind {
                AbsKind::Trivial => Rational::one(),
                AbsKind::Standard => x.abs(),
                AbsKind::PAdic(p) => {
                    let v = padic_valuation(p, x).expect("nonzero");
                    pow_int(&int(p as i64), -v)
                }
            }
        };
        AbsValue { base, exponent: self.power.clone() }
    }
}

/// `abs_eval(av, x)`: see [`AbsoluteValue::eval`].
pub fn abs_eval(av: &AbsoluteValue, x: &Rational) -> AbsValue {
    av.eval(x)
}

/// The exact value `base^exponent` with `base ≥ 0` and `exponent > 0`.
#[derive(Clone, Debug)]
pub struct AbsValue {
    pub base: Rational,
    pub exponent: Rational,
}

impl AbsValue {
    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    /// The value as a rational, when it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        rational_pow(&self.base, &self.exponent)
    }

    pub fn try_rational(&self) -> Result<Rational> {
        self.to_rational().ok_or_else(|| Error::InexactPower(self.to_string()))
    }

    pub fn mul(&self, other: &AbsValue) -> Result<AbsValue> {
        if self.exponent != other.exponent {
            return Err(Error::InexactPower(format!("{self} * {other}")));
        }
        Ok(AbsValue { base: &self.base * &other.base, exponent: self.exponent.clone() })
    }
}

impl PartialEq for AbsValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AbsValue {}

impl PartialOrd for AbsValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AbsValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.exponent == other.exponent {
            self.base.cmp(&other.base)
        } else {
            cmp_powers(&self.base, &self.exponent, &other.base, &other.exponent)
        }
    }
}

impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            Some(r) => write!(f, "{}", format_rational(&r)),
            None => write!(f, "({})^({})", format_rational(&self.base), format_rational(&self.exponent)),
        }
    }
}

impl Serialize for AbsValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn int_valuation(p: u64, n: &BigInt) -> i64 {
    if let Some(mut m) = n.to_u64().or_else(|| (-n).to_u64()) {
        let mut v = 0;
        while m % p == 0 {
            m /= p;
            v += 1;
        }
        return v;
    }
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `v` with `x = p^v · a/b` and `p ∤ a, b`.
pub fn padic_valuation(p: u64, x: &Rational) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(int_valuation(p, x.numer()) - int_valuation(p, x.denom()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsAxiom {
    Multiplicative,
    Definite,
    Level,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsViolation {
    pub axiom: AbsAxiom,
    #[serde(serialize_with = "ser_pair")]
    pub witness: (Rational, Rational),
}

fn ser_pair<S: serde::Serializer>(p: &(Rational, Rational), s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq([format_rational(&p.0), format_rational(&p.1)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsReport {
    pub level: QParam,
    pub pairs_checked: usize,
    pub violations: Vec<AbsViolation>,
}

impl AbsReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks multiplicativity, definiteness and the level inequality on all
/// ordered pairs of samples, keeping the first witness for each axiom.
pub fn validate_absolute_value(av: &AbsoluteValue, level: &QParam, samples: &[Rational]) -> Result<AbsReport> {
    if samples.is_empty() {
        return Err(Error::EmptyList);
    }
    let values: Vec<AbsValue> = samples.iter().map(|x| av.eval(x)).collect();
    let mut violations: Vec<AbsViolation> = Vec::new();
    let mut note = |axiom, x: &Rational, y: &Rational| {
        if !violations.iter().any(|v| v.axiom == axiom) {
            violations.push(AbsViolation { axiom, witness: (x.clone(), y.clone()) });
        }
    };
    for (x, vx) in samples.iter().zip(&values) {
        if vx.base.is_negative() || vx.is_zero() != x.is_zero() {
            note(AbsAxiom::Definite, x, x);
        }
    }
    let level_exp = match level {
        QParam::Finite(q) => Some(&av.power * q),
        QParam::Inf => None,
    };
    let mut pairs = 0;
    for (x, vx) in samples.iter().zip(&values) {
        for (y, vy) in samples.iter().zip(&values) {
            pairs += 1;
            let prod = av.eval(&(x * y));
            if prod.base != &vx.base * &vy.base {
                note(AbsAxiom::Multiplicative, x, y);
            }
            let sum = av.eval(&(x + y));
            let ok = match &level_exp {
                None => sum.base <= vx.base.clone().max(vy.base.clone()),
                Some(e) => pow_le_sum(&sum.base, &vx.base, &vy.base, e),
            };
            if !ok {
                note(AbsAxiom::Level, x, y);
            }
        }
    }
    violations.sort_by_key(|v| v.axiom as u8);
    Ok(AbsReport { level: level.clone(), pairs_checked: pairs, violations })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Archimedean {
    /// `|n0 · 1| > 1`, hence `|n0^j · 1| = |n0 · 1|^j` is unbounded.
    Archimedean { n0: u64 },
    /// Ultrametric, hence `|n · 1| ≤ 1` for all `n`.
    NonArchimedeanCertified,
    UndeterminedUpTo { n_max: u64 },
}

pub fn is_archimedean(av: &AbsoluteValue, n_max: u64) -> Archimedean {
    if av.is_ultrametric() {
        return Archimedean::NonArchimedeanCertified;
    }
    archimedean_by_search(|n| av.eval(&int(n as i64)), n_max)
}

/// Looks for `n ≤ n_max` with `|n · 1| > 1`.
pub fn archimedean_by_search(eval: impl Fn(u64) -> AbsValue, n_max: u64) -> Archimedean {
    let one = AbsValue { base: Rational::one(), exponent: Rational::one() };
    match (2..=n_max).find(|&n| eval(n) > one) {
        Some(n0) => Archimedean::Archimedean { n0 },
        None => Archimedean::UndeterminedUpTo { n_max },
    }
}

fn check_distinct(samples: &[Rational]) -> Result<()> {
    let mut sorted: Vec<&Rational> = samples.iter().collect();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateSample(format_rational(w[0])));
    }
    Ok(())
}

/// `d(x_i, x_j) = |x_i − x_j|` on the sample points.
pub fn metric_from_abs(av: &AbsoluteValue, samples: &[Rational]) -> Result<SemiMetric> {
    check_distinct(samples)?;
    let level = if av.is_ultrametric() {
        QParam::Inf
    } else if av.power.is_one() {
        QParam::one()
    } else {
        return Err(Error::Unsupported("standard absolute value with power other than 1".into()));
    };
    let n = samples.len();
    let mut values = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = av.eval(&(&samples[i] - &samples[j])).try_rational()?;
            values[i][j] = v.clone();
            values[j][i] = v;
        }
    }
    SemiMetric::new(values, level)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Sup,
    TrivialNorm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UltranormSpec {
    dim: usize,
    abs: AbsoluteValue,
    kind: NormKind,
}

impl UltranormSpec {
    /// The sup norm needs an ultrametric absolute value; the trivial norm is
    /// homogeneous only over the trivial absolute value.
    pub fn new(dim: usize, abs: AbsoluteValue, kind: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        match kind {
            NormKind::Sup if !abs.is_ultrametric() => {
                Err(Error::Unsupported("sup ultranorm needs an ultrametric absolute value".into()))
            }
            NormKind::TrivialNorm if abs.kind != AbsKind::Trivial => {
                Err(Error::Unsupported("trivial ultranorm needs the trivial absolute value".into()))
            }
            _ => Ok(UltranormSpec { dim, abs, kind }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn abs(&self) -> &AbsoluteValue {
        &self.abs
    }
}

pub fn norm_eval(spec: &UltranormSpec, v: &[Rational]) -> Result<Rational> {
    if v.len() != spec.dim {
        return Err(Error::DimensionMismatch { expected: spec.dim, got: v.len() });
    }
    match spec.kind {
        NormKind::TrivialNorm => Ok(if v.iter().all(Zero::is_zero) { Rational::zero() } else { Rational::one() }),
        NormKind::Sup => {
            let m = v.iter().map(|x| spec.abs.eval(x)).max().expect("dim ≥ 1");
            m.try_rational()
        }
    }
}

/// `d(v, w) = N(v − w)` on sample vectors, an ultrametric.
pub fn norm_metric(spec: &UltranormSpec, vectors: &[Vec<Rational>]) -> Result<SemiMetric> {
    let n = vectors.len();
    let mut values = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let diff: Vec<Rational> = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a - b).collect();
                if diff.len() != spec.dim || vectors[j].len() != spec.dim {
                    return Err(Error::DimensionMismatch { expected: spec.dim, got: vectors[i].len().min(vectors[j].len()) });
                }
                values[i][j] = norm_eval(spec, &diff)?;
            }
        }
    }
    SemiMetric::new(values, QParam::Inf)
}

/// All `a/b` with `|a| ≤ h` and `1 ≤ b ≤ h`, sorted and without repeats.
pub fn farey_samples(h: u64) -> Vec<Rational> {
    let h = h as i64;
    let mut out: Vec<Rational> = Vec::new();
    for b in 1..=h {
        for a in -h..=h {
            if a.gcd(&b) == 1 || a == 0 && b == 1 {
                out.push(Rational::new(BigInt::from(a), BigInt::from(b)));
            }
        }
    }
    out.sort();
    out
}

/// `max(a, b) ≤ (a^q + b^q)^(1/q) ≤ 2^(1/q) · max(a, b)` for `a, b ≥ 0`,
/// `q > 0`, decided exactly. Raising to the `q`-th power turns the chain
/// into `m^q ≤ a^q + b^q ≤ m^q + m^q` with `m = max(a, b)`; after cancelling
/// the `m^q` term on the right the upper half reads `min(a, b)^q ≤ m^q`.
pub fn q_bracket_holds(a: &Rational, b: &Rational, q: &Rational) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let lower = pow_le_sum(hi, a, b, q);
    let upper = cmp_powers(lo, q, hi, q) != Ordering::Greater;
    lower && upper
}
