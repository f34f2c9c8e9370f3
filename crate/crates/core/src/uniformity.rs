//! Uniformities on finite carriers, represented by validated bases.
//!
//! The full uniformity is the upward closure of the base and is never
//! materialized; every query reduces to "some base element is contained in
//! ...". On a finite carrier every subset is compact, so the compactness
//! hypotheses behind uniform neighborhoods and uniform continuity on
//! compacta always hold.

use serde::{Deserialize, Serialize};

use crate::metrics::SemiMetric;
use crate::relation::{check_map, check_size, Relation, MAX_SPACE};
use crate::set::ElementSet;
use crate::{Error, Result};

/// Largest carrier for which open sets are enumerated exhaustively.
pub const ENUMERATION_CAP: usize = 16;

pub(crate) fn check_enumerable(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        Err(Error::SpaceTooLargeForEnumeration { size: n, cap: ENUMERATION_CAP })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum BaseViolation {
    /// Element does not contain the diagonal.
    NotReflexive { element: usize },
    /// No element lies inside the inverse of this one.
    NoInverse { element: usize },
    /// No element `V` has `V * V` inside this one.
    NoSquareRoot { element: usize },
    /// No element lies inside the intersection of these two.
    NoIntersection { left: usize, right: usize },
}

/// Which base axioms fail, with the offending element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseReport {
    pub violations: Vec<BaseViolation>,
}

impl BaseReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn common_size(elements: &[Relation]) -> Result<usize> {
    let n = elements.first().ok_or(Error::EmptyList)?.size();
    match elements.iter().find(|r| r.size() != n) {
        Some(r) => Err(Error::SpaceMismatch { left: n, right: r.size() }),
        None => Ok(n),
    }
}

fn has_below(family: &[Relation], target: &Relation) -> bool {
    family.iter().any(|v| v.is_subset(target))
}

/// Checks the base axioms: every element contains `Δ`; each `U` has some
/// `V₀ ⊆ Ũ` and some `V` with `V * V ⊆ U`; any two elements have an
/// element inside their intersection.
pub fn validate_base(elements: &[Relation]) -> Result<BaseReport> {
    common_size(elements)?;
    let mut violations = Vec::new();
    for (k, u) in elements.iter().enumerate() {
        if !u.is_reflexive() {
            violations.push(BaseViolation::NotReflexive { element: k });
        }
        if !has_below(elements, &u.inverse()) {
            violations.push(BaseViolation::NoInverse { element: k });
        }
        let has_root = elements.iter().any(|v| v.compose(v).map(|vv| vv.is_subset(u)).unwrap_or(false));
        if !has_root {
            violations.push(BaseViolation::NoSquareRoot { element: k });
        }
    }
    for (i, u) in elements.iter().enumerate() {
        for (j, v) in elements.iter().enumerate().skip(i + 1) {
            let meet = u.intersection(v)?;
            if !has_below(elements, &meet) {
                violations.push(BaseViolation::NoIntersection { left: i, right: j });
            }
        }
    }
    Ok(BaseReport { violations })
}

/// A validated base for a uniformity on `{0, .., n-1}`. Elements are
/// deduplicated and kept in first-insertion order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BaseJson", into = "BaseJson")]
pub struct UniformityBase {
    n: usize,
    elements: Vec<Relation>,
}

/// Wire form: `{"size": n, "relations": [<relation>, ...]}`.
#[derive(Serialize, Deserialize)]
pub struct BaseJson {
    pub size: usize,
    pub relations: Vec<Relation>,
}

impl TryFrom<BaseJson> for UniformityBase {
    type Error = Error;
    fn try_from(j: BaseJson) -> Result<Self> {
        let base = UniformityBase::new(j.relations)?;
        if base.n != j.size {
            return Err(Error::SpaceMismatch { left: j.size, right: base.n });
        }
        Ok(base)
    }
}

impl From<UniformityBase> for BaseJson {
    fn from(b: UniformityBase) -> Self {
        BaseJson { size: b.n, relations: b.elements }
    }
}

fn dedup(elements: Vec<Relation>) -> Vec<Relation> {
    let mut out: Vec<Relation> = Vec::with_capacity(elements.len());
    for e in elements {
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

/// Open sets of a finite topology, in subset-mask order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    opens: Vec<ElementSet>,
}

impl Topology {
    /// Materializes `{A : is_open(A)}` by exhaustive enumeration.
    pub fn from_predicate(n: usize, is_open: impl Fn(&ElementSet) -> bool) -> Result<Self> {
        check_enumerable(n)?;
        let opens = ElementSet::all_subsets(n).filter(|a| is_open(a)).collect();
        Ok(Topology { n, opens })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn opens(&self) -> &[ElementSet] {
        &self.opens
    }

    pub fn is_open(&self, a: &ElementSet) -> bool {
        self.opens.binary_search_by_key(&a.mask(), |o| o.mask()).is_ok()
    }

    pub fn is_closed(&self, a: &ElementSet) -> bool {
        self.is_open(&a.complement())
    }

    pub fn is_clopen(&self, a: &ElementSet) -> bool {
        self.is_open(a) && self.is_closed(a)
    }

    /// Checks the topology axioms: `∅`, `X`, pairwise unions and intersections.
    pub fn is_topology(&self) -> bool {
        let has = |a: &ElementSet| self.is_open(a);
        if !has(&ElementSet::empty(self.n)) || !has(&ElementSet::full(self.n)) {
            return false;
        }
        self.opens.iter().all(|a| self.opens.iter().all(|b| has(&a.union(b)) && has(&a.intersection(b))))
    }

    /// Union of the open sets inside `a`.
    pub fn interior(&self, a: &ElementSet) -> ElementSet {
        let mut out = ElementSet::empty(self.n);
        for o in self.opens.iter().filter(|o| o.is_subset(a)) {
            out.union_with(o);
        }
        out
    }

    /// Complement of the union of the open sets disjoint from `a`.
    pub fn closure(&self, a: &ElementSet) -> ElementSet {
        let mut out = ElementSet::empty(self.n);
        for o in self.opens.iter().filter(|o| o.is_disjoint(a)) {
            out.union_with(o);
        }
        out.complement()
    }

    /// The smallest open set containing `x`.
    pub fn minimal_open(&self, x: usize) -> ElementSet {
        let mut out = ElementSet::full(self.n);
        for o in self.opens.iter().filter(|o| o.contains(x)) {
            out.intersect_with(o);
        }
        out
    }

    pub fn is_hausdorff(&self) -> bool {
        (0..self.n).all(|x| {
            (0..self.n).all(|y| {
                x == y
                    || self.opens.iter().any(|a| {
                        a.contains(x) && !a.contains(y) && self.opens.iter().any(|b| b.contains(y) && a.is_disjoint(b))
                    })
            })
        })
    }

    /// Whether `e` is connected in the subspace topology.
    pub fn is_connected(&self, e: &ElementSet) -> bool {
        // a split of e is e ∩ O1, e ∩ O2 disjoint, nonempty, covering e
        !self.opens.iter().any(|a| {
            let p = a.intersection(e);
            !p.is_empty()
                && p != *e
                && self.opens.iter().any(|b| {
                    let q = b.intersection(e);
                    p.is_disjoint(&q) && p.union(&q) == *e
                })
        })
    }
}

/// Outcome of a uniform-continuity query; `witness` is the target base
/// element whose preimage is not in the source uniformity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuityReport {
    pub uniformly_continuous: bool,
    pub witness: Option<Relation>,
}

/// Minimal cover sizes `min |A|` with `E ⊆ U[A]`, one per base element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TotalBoundedness {
    pub totally_bounded: bool,
    pub min_cover_sizes: Vec<usize>,
    /// False when the carrier is too large for exhaustive search and the
    /// sizes come from a greedy cover.
    pub exact: bool,
}

impl UniformityBase {
    /// Deduplicates and validates; fails with the full report otherwise.
    pub fn new(elements: Vec<Relation>) -> Result<Self> {
        let n = common_size(&elements)?;
        let elements = dedup(elements);
        let report = validate_base(&elements)?;
        if !report.valid() {
            return Err(Error::InvalidBase(Box::new(report)));
        }
        Ok(UniformityBase { n, elements })
    }

    /// `{Δ}`: the discrete uniformity.
    pub fn discrete(n: usize) -> Self {
        UniformityBase { n, elements: vec![Relation::diagonal(n)] }
    }

    /// `{X × X}`: the indiscrete uniformity.
    pub fn indiscrete(n: usize) -> Self {
        UniformityBase { n, elements: vec![Relation::full(n)] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Relation] {
        &self.elements
    }

    /// Closes a sub-base under finite intersections after checking that each
    /// member contains `Δ` and has an inverse witness and a square root in
    /// the intersection family.
    pub fn from_subbase(subbase: Vec<Relation>) -> Result<Self> {
        common_size(&subbase)?;
        let mut family = dedup(subbase.clone());
        let mut k = 0;
        while k < family.len() {
            for j in 0..k {
                let meet = family[k].intersection(&family[j])?;
                if !family.contains(&meet) {
                    family.push(meet);
                }
            }
            k += 1;
        }
        for (i, u) in subbase.iter().enumerate() {
            if !u.is_reflexive() {
                return Err(Error::InvalidSubbase(format!("element {i} does not contain the diagonal")));
            }
            if !has_below(&family, &u.inverse()) {
                return Err(Error::InvalidSubbase(format!("element {i} has no inverse witness")));
            }
            if !family.iter().any(|v| v.compose(v).map(|vv| vv.is_subset(u)).unwrap_or(false)) {
                return Err(Error::InvalidSubbase(format!("element {i} has no square root")));
            }
        }
        Self::new(family)
    }

    /// `{U_d(r) : r canonical}`.
    pub fn from_semimetric(d: &SemiMetric) -> Self {
        let elements = dedup(d.canonical_radii().iter().map(|r| d.entourage(r)).collect());
        UniformityBase { n: d.size(), elements }
    }

    fn check_space(&self, n: usize) -> Result<()> {
        if n == self.n {
            Ok(())
        } else {
            Err(Error::SpaceMismatch { left: self.n, right: n })
        }
    }

    /// Membership in the generated uniformity: some base element lies in `u`.
    pub fn contains(&self, u: &Relation) -> Result<bool> {
        self.check_space(u.size())?;
        Ok(has_below(&self.elements, u))
    }

    /// `A` is open iff every `x ∈ A` has a base element with `U[x] ⊆ A`.
    pub fn is_open(&self, a: &ElementSet) -> bool {
        a.iter().all(|x| self.elements.iter().any(|u| u.row(x).is_subset(a)))
    }

    pub fn topology(&self) -> Result<Topology> {
        Topology::from_predicate(self.n, |a| self.is_open(a))
    }

    /// `{x : U[x] ⊆ A for some U}`.
    pub fn interior(&self, a: &ElementSet) -> ElementSet {
        let mut out = ElementSet::empty(self.n);
        for x in 0..self.n {
            if self.elements.iter().any(|u| u.row(x).is_subset(a)) {
                out.insert(x);
            }
        }
        out
    }

    /// `⋂_V V[A]` over base elements.
    pub fn closure(&self, a: &ElementSet) -> ElementSet {
        let mut out = ElementSet::full(self.n);
        for v in &self.elements {
            out.intersect_with(&v.image(a).expect("same carrier"));
        }
        out
    }

    /// `{x : U[x] ∩ A ≠ ∅ for every base U}`.
    pub fn closure_by_points(&self, a: &ElementSet) -> ElementSet {
        let mut out = ElementSet::empty(self.n);
        for x in 0..self.n {
            if self.elements.iter().all(|u| !u.row(x).is_disjoint(a)) {
                out.insert(x);
            }
        }
        out
    }

    /// `⋂_{V₁, V₂} V₁ * E * V₂`: the closure of `E` in `X × X`.
    pub fn product_closure(&self, e: &Relation) -> Result<Relation> {
        self.check_space(e.size())?;
        let mut out = Relation::full(self.n);
        for v1 in &self.elements {
            let left = v1.compose(e)?;
            for v2 in &self.elements {
                out = out.intersection(&left.compose(v2)?)?;
            }
        }
        Ok(out)
    }

    /// Intersection of all base elements; the topology is Hausdorff iff
    /// this is `Δ`.
    pub fn core(&self) -> Relation {
        self.elements.iter().fold(Relation::full(self.n), |acc, u| acc.intersection(u).expect("same carrier"))
    }

    pub fn is_hausdorff(&self) -> bool {
        self.core() == Relation::diagonal(self.n)
    }

    /// The first base element `V` with `V[K] ⊆ W`, for `K ⊆ W` and `W` open.
    pub fn uniform_neighborhood(&self, k: &ElementSet, w: &ElementSet) -> Result<Relation> {
        self.check_space(k.universe())?;
        self.check_space(w.universe())?;
        if !self.is_open(w) {
            return Err(Error::NotOpen);
        }
        if !k.is_subset(w) {
            return Err(Error::NotContained);
        }
        let found = self.elements.iter().find(|v| v.image(k).map(|img| img.is_subset(w)).unwrap_or(false));
        Ok(found.expect("open sets around a finite set admit a uniform neighborhood").clone())
    }

    /// `f` is uniformly continuous iff `f₂⁻¹(V)` is in this uniformity for
    /// every base element `V` of `dst`.
    pub fn uniformly_continuous(&self, f: &[usize], dst: &UniformityBase) -> Result<ContinuityReport> {
        self.check_space(f.len())?;
        check_map(f, dst.n)?;
        for v in &dst.elements {
            if !self.contains(&v.preimage(f)?)? {
                return Ok(ContinuityReport { uniformly_continuous: false, witness: Some(v.clone()) });
            }
        }
        Ok(ContinuityReport { uniformly_continuous: true, witness: None })
    }

    /// Uniform continuity along `E`: for every target `V` some source `U`
    /// maps each `(x, x') ∈ U` with `x ∈ E` into `V`.
    pub fn uniformly_continuous_along(&self, f: &[usize], dst: &UniformityBase, e: &ElementSet) -> Result<ContinuityReport> {
        self.check_space(f.len())?;
        self.check_space(e.universe())?;
        check_map(f, dst.n)?;
        for v in &dst.elements {
            let ok = self.elements.iter().any(|u| e.iter().all(|x| u.row(x).iter().all(|y| v.contains(f[x], f[y]))));
            if !ok {
                return Ok(ContinuityReport { uniformly_continuous: false, witness: Some(v.clone()) });
            }
        }
        Ok(ContinuityReport { uniformly_continuous: true, witness: None })
    }

    /// Topological continuity of `f` into `dst`, by preimages of open sets.
    pub fn continuous(&self, f: &[usize], dst: &UniformityBase) -> Result<bool> {
        self.check_space(f.len())?;
        check_map(f, dst.n)?;
        let target = dst.topology()?;
        Ok(target.opens().iter().all(|o| {
            let pre = ElementSet::from_indices(self.n, (0..self.n).filter(|&x| o.contains(f[x]))).expect("in range");
            self.is_open(&pre)
        }))
    }

    /// The induced base on `Y`, re-indexed to `0..|Y|` in increasing order.
    pub fn induced(&self, y: &ElementSet) -> Result<UniformityBase> {
        self.check_space(y.universe())?;
        if y.is_empty() {
            return Err(Error::EmptySubset);
        }
        let idx = y.to_vec();
        let elements = self.elements.iter().map(|v| v.preimage(&idx)).collect::<Result<Vec<_>>>()?;
        UniformityBase::new(elements)
    }

    /// `{f₂⁻¹(V) : V ∈ dst}` on a source carrier of size `f.len()`.
    pub fn pullback(dst: &UniformityBase, f: &[usize]) -> Result<UniformityBase> {
        check_map(f, dst.n)?;
        check_size(f.len())?;
        let elements = dst.elements.iter().map(|v| v.preimage(f)).collect::<Result<Vec<_>>>()?;
        UniformityBase::new(elements)
    }

    /// `{U₁ ∩ V₂}` on the product carrier, with `(i, j) ↦ i·n_y + j`.
    pub fn product(&self, other: &UniformityBase) -> Result<UniformityBase> {
        let (nx, ny) = (self.n, other.n);
        if nx * ny > MAX_SPACE {
            return Err(Error::ProductTooLarge(nx, ny));
        }
        let mut elements = Vec::new();
        for u in &self.elements {
            for v in &other.elements {
                elements.push(Relation::from_fn(nx * ny, |a, b| u.contains(a / ny, b / ny) && v.contains(a % ny, b % ny)));
            }
        }
        Ok(UniformityBase { n: nx * ny, elements: dedup(elements) })
    }

    /// Whether every entourage of `d` belongs to this uniformity.
    pub fn compatible(&self, d: &SemiMetric) -> Result<bool> {
        self.check_space(d.size())?;
        Ok(d.canonical_radii().iter().all(|r| has_below(&self.elements, &d.entourage(r))))
    }

    /// Always totally bounded on a finite carrier; reports the minimal
    /// number of `U`-neighborhoods needed to cover `e` for each base `U`.
    pub fn totally_bounded(&self, e: &ElementSet) -> Result<TotalBoundedness> {
        self.check_space(e.universe())?;
        let exact = self.n <= ENUMERATION_CAP;
        let min_cover_sizes = self
            .elements
            .iter()
            .map(|u| if exact { min_cover_exact(u, e) } else { greedy_cover(u, e) })
            .collect();
        Ok(TotalBoundedness { totally_bounded: true, min_cover_sizes, exact })
    }

    /// The equivalence-relation base `{(U ∩ Ũ)^ : U ∈ base}`.
    pub fn eq_base(&self) -> UniformityBase {
        let elements = self
            .elements
            .iter()
            .map(|u| u.symmetrize().hat_closure().expect("symmetrized entourages are reflexive and symmetric"))
            .collect();
        UniformityBase { n: self.n, elements: dedup(elements) }
    }
}

/// Splits `e` into `V`-small pieces (`B × B ⊆ V`) greedily.
pub fn small_cover(v: &Relation, e: &ElementSet) -> Vec<ElementSet> {
    let mut left = e.clone();
    let mut pieces = Vec::new();
    while let Some(x) = left.first() {
        let mut b = ElementSet::singleton(e.universe(), x);
        for y in left.iter().skip(1) {
            if b.iter().all(|z| v.contains(z, y) && v.contains(y, z)) {
                b.insert(y);
            }
        }
        left = left.difference(&b);
        pieces.push(b);
    }
    pieces
}

fn greedy_cover(u: &Relation, e: &ElementSet) -> usize {
    let n = u.size();
    let mut left = e.clone();
    let mut count = 0;
    while !left.is_empty() {
        let best = (0..n).max_by_key(|&x| u.row(x).intersection(&left).len()).expect("nonempty carrier");
        left = left.difference(&u.row(best));
        count += 1;
    }
    count
}

fn min_cover_exact(u: &Relation, e: &ElementSet) -> usize {
    let n = u.size();
    let rows: Vec<u64> = (0..n).map(|x| u.row(x).mask()).collect();
    let target = e.mask();
    if target == 0 {
        return 0;
    }
    // iterative deepening over center sets of size k
    for k in 1..=n {
        let mut found = false;
        for_each_combination(n, k, &mut |centers: &[usize]| {
            let covered = centers.iter().fold(0u64, |acc, &c| acc | rows[c]);
            if covered & target == target {
                found = true;
            }
            found
        });
        if found {
            return k;
        }
    }
    unreachable!("every point covers itself")
}

fn for_each_combination(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return visit(cur);
        }
        for i in start..n {
            cur.push(i);
            if go(i + 1, n, k, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    go(0, n, k, &mut Vec::with_capacity(k), visit);
}
