//! Finite groups given by Cayley tables, their translation-invariant
//! relations and the uniformities and topologies built from subgroups.
//!
//! `A_L = {(x, y) : x⁻¹y ∈ A}` and `A_R = {(x, y) : yx⁻¹ ∈ A}`, so that
//! `A_L[x] = xA` and `A_R[x] = Ax`. Some authors write `W_R` for what is
//! `(W⁻¹)_R` here.

use serde::{Deserialize, Serialize};

use crate::metrics::SemiMetric;
use crate::relation::Relation;
use crate::set::ElementSet;
use crate::uniformity::{check_enumerable, Topology, UniformityBase};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub struct FiniteGroup {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
pub struct GroupJson {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl TryFrom<GroupJson> for FiniteGroup {
    type Error = Error;

    fn try_from(j: GroupJson) -> Result<Self> {
        FiniteGroup::new(j.elements, j.table)
    }
}

impl From<FiniteGroup> for GroupJson {
    fn from(g: FiniteGroup) -> Self {
        GroupJson { elements: g.elements, table: g.table }
    }
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn new(elements: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        let bad = |m: String| Err(Error::InvalidGroup(m));
        if n == 0 {
            return bad("empty group".into());
        }
        crate::relation::check_size(n)?;
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return bad(format!("table must be {n}×{n}"));
        }
        if let Some(v) = table.iter().flatten().find(|&&v| v >= n) {
            return bad(format!("entry {v} out of range"));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|i| table[e][i] == i && table[i][e] == i)) else {
            return bad("no identity".into());
        };
        let mut inverses = Vec::with_capacity(n);
        for i in 0..n {
            match (0..n).find(|&j| table[i][j] == identity && table[j][i] == identity) {
                Some(j) => inverses.push(j),
                None => return bad(format!("element {i} has no inverse")),
            }
        }
        Ok(FiniteGroup { elements, table, identity, inverses })
    }

    fn from_op(elements: Vec<String>, op: impl Fn(usize, usize) -> usize) -> Self {
        let n = elements.len();
        let table = (0..n).map(|a| (0..n).map(|b| op(a, b)).collect()).collect();
        Self::new(elements, table).expect("construction yields a group")
    }

    /// `Z/n` with elements `0..n` under addition.
    pub fn cyclic(n: usize) -> Self {
        Self::from_op((0..n).map(|i| i.to_string()).collect(), |a, b| (a + b) % n)
    }

    /// The symmetric group on `k ≤ 5` letters, elements in lexicographic
    /// order of their one-line forms (identity first) and labelled in cycle
    /// notation. The product `στ` applies `τ` first.
    pub fn symmetric(k: usize) -> Self {
        assert!((1..=5).contains(&k));
        let mut perms: Vec<Vec<usize>> = vec![(0..k).collect()];
        loop {
            let mut p = perms.last().expect("nonempty").clone();
            let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
            let j = (i + 1..k).rev().find(|&j| p[j] > p[i]).expect("successor exists");
            p.swap(i, j);
            p[i + 1..].reverse();
            perms.push(p);
        }
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed under composition");
        let labels = perms.iter().map(|p| cycle_label(p)).collect();
        Self::from_op(labels, |a, b| index(&(0..k).map(|x| perms[a][perms[b][x]]).collect()))
    }

    /// The dihedral group of order `2m`: index `i + m·j` is `r^i s^j`.
    pub fn dihedral(m: usize) -> Self {
        let labels = (0..2 * m)
            .map(|x| match (x % m, x / m) {
                (0, 0) => "e".to_string(),
                (i, 0) => format!("r{i}"),
                (0, _) => "s".to_string(),
                (i, _) => format!("r{i}s"),
            })
            .collect();
        Self::from_op(labels, |x, y| {
            let (a, b, c, d) = (x % m, x / m, y % m, y / m);
            let i = if b == 0 { a + c } else { a + m - c } % m;
            i + m * ((b + d) % 2)
        })
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        const NAMES: [&str; 8] = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"];
        // unit products: (sign flip, unit) for 1, i, j, k
        const UNIT: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        Self::from_op(NAMES.iter().map(|s| s.to_string()).collect(), |x, y| {
            let (flip, u) = UNIT[x % 4][y % 4];
            let neg = (x >= 4) ^ (y >= 4) ^ flip;
            u + if neg { 4 } else { 0 }
        })
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|l| l == label)
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.size()).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn subset(&self, members: &[usize]) -> Result<ElementSet> {
        ElementSet::from_indices(self.size(), members.iter().copied())
    }

    fn check_subset(&self, a: &ElementSet) -> Result<()> {
        if a.universe() != self.size() {
            return Err(Error::SpaceMismatch { left: self.size(), right: a.universe() });
        }
        Ok(())
    }

    fn check_relation(&self, u: &Relation) -> Result<()> {
        if u.size() != self.size() {
            return Err(Error::SpaceMismatch { left: self.size(), right: u.size() });
        }
        Ok(())
    }

    fn collect(&self, it: impl Iterator<Item = usize>) -> ElementSet {
        let mut s = ElementSet::empty(self.size());
        for x in it {
            s.insert(x);
        }
        s
    }

    pub fn inverse_set(&self, a: &ElementSet) -> ElementSet {
        self.collect(a.iter().map(|x| self.inv(x)))
    }

    /// `AB = {ab : a ∈ A, b ∈ B}`.
    pub fn product_set(&self, a: &ElementSet, b: &ElementSet) -> ElementSet {
        self.collect(a.iter().flat_map(|x| b.iter().map(move |y| self.mul(x, y))))
    }

    pub fn left_translate(&self, x: usize, a: &ElementSet) -> ElementSet {
        self.collect(a.iter().map(|y| self.mul(x, y)))
    }

    pub fn right_translate(&self, a: &ElementSet, x: usize) -> ElementSet {
        self.collect(a.iter().map(|y| self.mul(y, x)))
    }

    /// `C_g(A) = gAg⁻¹`.
    pub fn conjugate_set(&self, g: usize, a: &ElementSet) -> ElementSet {
        self.collect(a.iter().map(|y| self.mul(self.mul(g, y), self.inv(g))))
    }

    /// `L_{g,2}(U) = {(gx, gy) : (x, y) ∈ U}`.
    pub fn translate_left(&self, g: usize, u: &Relation) -> Relation {
        let mut out = Relation::empty(self.size());
        for (x, y) in u.pairs() {
            out.insert(self.mul(g, x), self.mul(g, y));
        }
        out
    }

    /// `R_{g,2}(U) = {(xg, yg) : (x, y) ∈ U}`.
    pub fn translate_right(&self, g: usize, u: &Relation) -> Relation {
        let mut out = Relation::empty(self.size());
        for (x, y) in u.pairs() {
            out.insert(self.mul(x, g), self.mul(y, g));
        }
        out
    }

    /// `C_{g,2}(U) = {(gxg⁻¹, gyg⁻¹) : (x, y) ∈ U}`.
    pub fn conjugate_relation(&self, g: usize, u: &Relation) -> Relation {
        self.translate_right(self.inv(g), &self.translate_left(g, u))
    }

    /// Coordinatewise inversion `j₂(U) = {(x⁻¹, y⁻¹) : (x, y) ∈ U}`.
    pub fn invert_relation(&self, u: &Relation) -> Relation {
        let mut out = Relation::empty(self.size());
        for (x, y) in u.pairs() {
            out.insert(self.inv(x), self.inv(y));
        }
        out
    }
}

fn cycle_label(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for s in 0..p.len() {
        if seen[s] || p[s] == s {
            continue;
        }
        out.push('(');
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            out.push_str(&(x + 1).to_string());
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        "e".into()
    } else {
        out
    }
}

/// `A_L = {(x, y) : x⁻¹y ∈ A}`.
pub fn relation_left(g: &FiniteGroup, a: &ElementSet) -> Result<Relation> {
    g.check_subset(a)?;
    Ok(Relation::from_fn(g.size(), |x, y| a.contains(g.mul(g.inv(x), y))))
}

/// `A_R = {(x, y) : yx⁻¹ ∈ A}`.
pub fn relation_right(g: &FiniteGroup, a: &ElementSet) -> Result<Relation> {
    g.check_subset(a)?;
    Ok(Relation::from_fn(g.size(), |x, y| a.contains(g.mul(y, g.inv(x)))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub left_invariant: bool,
    pub right_invariant: bool,
    pub conjugation_invariant: bool,
}

/// On a finite carrier `L_{g,2}(U) ⊆ U` for all `g` already forces
/// equality, since each translation is a bijection of pairs.
pub fn invariance(u: &Relation, g: &FiniteGroup) -> Result<InvarianceReport> {
    g.check_relation(u)?;
    let n = g.size();
    let left = (0..n).all(|h| u.pairs().all(|(x, y)| u.contains(g.mul(h, x), g.mul(h, y))));
    let right = (0..n).all(|h| u.pairs().all(|(x, y)| u.contains(g.mul(x, h), g.mul(y, h))));
    let conj = (0..n).all(|h| {
        let c = |x| g.mul(g.mul(h, x), g.inv(h));
        u.pairs().all(|(x, y)| u.contains(c(x), c(y)))
    });
    Ok(InvarianceReport { left_invariant: left, right_invariant: right, conjugation_invariant: conj })
}

/// `A = U[e]`, from which `U = A_L` (or `A_R`) is recovered.
pub fn subset_from_invariant(u: &Relation, g: &FiniteGroup) -> Result<ElementSet> {
    let r = invariance(u, g)?;
    if !(r.left_invariant || r.right_invariant) {
        return Err(Error::NotInvariant);
    }
    Ok(u.row(g.identity()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupReport {
    pub contains_identity: bool,
    pub is_subgroup: bool,
    pub is_normal: bool,
}

pub fn subgroup_check(g: &FiniteGroup, a: &ElementSet) -> Result<SubgroupReport> {
    g.check_subset(a)?;
    let contains_identity = a.contains(g.identity());
    let is_subgroup = contains_identity && a.iter().all(|x| a.iter().all(|y| a.contains(g.mul(x, g.inv(y)))));
    let is_normal = is_subgroup && (0..g.size()).all(|h| g.conjugate_set(h, a) == *a);
    Ok(SubgroupReport { contains_identity, is_subgroup, is_normal })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratedSubgroup {
    pub subgroup: ElementSet,
    /// The input lacked `e` or was not closed under inverses and was
    /// replaced by `W ∪ W⁻¹ ∪ {e}`.
    pub symmetrized: bool,
    /// Number of squarings `W ↦ W·W` until the fixpoint.
    pub steps: usize,
}

/// `Ŵ = ⋃ W^n`, computed by repeated squaring.
pub fn generated_subgroup(g: &FiniteGroup, w: &ElementSet) -> Result<GeneratedSubgroup> {
    g.check_subset(w)?;
    let mut sym = w.union(&g.inverse_set(w));
    sym.insert(g.identity());
    let symmetrized = sym != *w;
    let mut cur = sym;
    let mut steps = 0;
    loop {
        let next = g.product_set(&cur, &cur);
        if next == cur {
            return Ok(GeneratedSubgroup { subgroup: cur, symmetrized, steps });
        }
        cur = next;
        steps += 1;
    }
}

/// `⋂_g L_{g,2}(U) = (⋂_h h·U[h⁻¹])_L`: the largest left-invariant relation
/// inside `U`, with its subset.
pub fn left_core(u: &Relation, g: &FiniteGroup) -> Result<(Relation, ElementSet)> {
    g.check_relation(u)?;
    let mut a = ElementSet::full(g.size());
    for h in 0..g.size() {
        a.intersect_with(&g.left_translate(h, &u.row(g.inv(h))));
    }
    Ok((relation_left(g, &a)?, a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupBase {
    pub base: UniformityBase,
    /// Pairwise intersections had to be added to make a filter base.
    pub augmented: bool,
    /// The neighborhood family actually used.
    pub neighborhoods: Vec<ElementSet>,
}

fn group_base(g: &FiniteGroup, neighborhoods: &[ElementSet], augment: bool, side: Side) -> Result<GroupBase> {
    if neighborhoods.is_empty() {
        return Err(Error::EmptyList);
    }
    for w in neighborhoods {
        g.check_subset(w)?;
        if !w.contains(g.identity()) {
            return Err(Error::InvalidFilterBase(format!("{:?} does not contain the identity", w.to_vec())));
        }
    }
    let mut family: Vec<ElementSet> = neighborhoods.to_vec();
    family.sort();
    family.dedup();
    let mut augmented = false;
    if augment {
        loop {
            let mut added = false;
            for i in 0..family.len() {
                for j in 0..i {
                    let c = family[i].intersection(&family[j]);
                    if !family.contains(&c) {
                        family.push(c);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
            augmented = true;
            family.sort();
        }
    } else {
        for a in &family {
            for b in &family {
                let c = a.intersection(b);
                if !family.iter().any(|w| w.is_subset(&c)) {
                    return Err(Error::InvalidFilterBase(format!(
                        "no member inside {:?} ∩ {:?}",
                        a.to_vec(),
                        b.to_vec()
                    )));
                }
            }
        }
    }
    for w in &family {
        if !family.iter().any(|v| g.product_set(v, v).is_subset(w)) {
            return Err(Error::NoSquareRoot(w.to_vec()));
        }
    }
    let rel = |a: &ElementSet| match side {
        Side::Left => relation_left(g, a),
        Side::Right => relation_right(g, a),
    };
    let elements = family.iter().map(rel).collect::<Result<Vec<_>>>()?;
    Ok(GroupBase { base: UniformityBase::new(elements)?, augmented, neighborhoods: family })
}

/// `𝓑_L = {W_L : W in the neighborhood family}`.
pub fn left_uniformity_base(g: &FiniteGroup, neighborhoods: &[ElementSet], augment: bool) -> Result<GroupBase> {
    group_base(g, neighborhoods, augment, Side::Left)
}

/// `𝓑_R = {W_R : W in the neighborhood family}`.
pub fn right_uniformity_base(g: &FiniteGroup, neighborhoods: &[ElementSet], augment: bool) -> Result<GroupBase> {
    group_base(g, neighborhoods, augment, Side::Right)
}

/// Checks that every member is a subgroup and that the family is
/// compatible with conjugation: for each `A` and `g` some member `B` lies
/// in `gAg⁻¹`.
pub fn check_subgroup_family(g: &FiniteGroup, family: &[ElementSet]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::EmptyList);
    }
    for a in family {
        if !subgroup_check(g, a)?.is_subgroup {
            return Err(Error::NotSubgroup(a.to_vec()));
        }
    }
    for a in family {
        for h in 0..g.size() {
            let c = g.conjugate_set(h, a);
            if !family.iter().any(|b| b.is_subset(&c)) {
                return Err(Error::NotConjugationCompatible { g: h });
            }
        }
    }
    Ok(())
}

/// The intersection of all members, the smallest finite intersection.
pub fn family_core(g: &FiniteGroup, family: &[ElementSet]) -> ElementSet {
    family.iter().fold(ElementSet::full(g.size()), |acc, a| acc.intersection(a))
}

/// `τ_𝓐`: `W` is open iff `x·(A_1 ∩ .. ∩ A_n) ⊆ W` for each `x ∈ W` and
/// some members `A_j`. The smallest such intersection is the intersection
/// `N` of the whole family, so the open sets are the unions of cosets of
/// `N`.
pub fn tau_from_subgroups(g: &FiniteGroup, family: &[ElementSet]) -> Result<Topology> {
    check_subgroup_family(g, family)?;
    check_enumerable(g.size())?;
    let core = family_core(g, family);
    Topology::from_predicate(g.size(), |w| w.iter().all(|x| g.left_translate(x, &core).is_subset(w)))
}

/// Whether `τ_𝓐` is Hausdorff, i.e. `⋂ 𝓐 = {e}`.
pub fn hausdorff_check(g: &FiniteGroup, family: &[ElementSet]) -> Result<bool> {
    check_subgroup_family(g, family)?;
    Ok(family_core(g, family) == ElementSet::singleton(g.size(), g.identity()))
}

pub fn invariant_semimetric_check(d: &SemiMetric, g: &FiniteGroup) -> Result<InvarianceReport> {
    let n = g.size();
    if d.size() != n {
        return Err(Error::SpaceMismatch { left: n, right: d.size() });
    }
    let holds = |f: &dyn Fn(usize, usize) -> usize| {
        (0..n).all(|a| (0..n).all(|x| (0..n).all(|y| d.get(f(a, x), f(a, y)) == d.get(x, y))))
    };
    Ok(InvarianceReport {
        left_invariant: holds(&|a, x| g.mul(a, x)),
        right_invariant: holds(&|a, x| g.mul(x, a)),
        conjugation_invariant: holds(&|a, x| g.mul(g.mul(a, x), g.inv(a))),
    })
}

/// All subgroups, found as the distinct subgroups generated by pairs of
/// elements and their joins; fine for the small groups used in tests.
pub fn all_subgroups(g: &FiniteGroup) -> Vec<ElementSet> {
    let n = g.size();
    let mut found: Vec<ElementSet> = Vec::new();
    let gen = |s: &ElementSet| generated_subgroup(g, s).expect("same carrier").subgroup;
    for a in 0..n {
        for b in a..n {
            let s = gen(&ElementSet::from_indices(n, [a, b]).expect("in range"));
            if !found.contains(&s) {
                found.push(s);
            }
        }
    }
    loop {
        let mut added = false;
        for i in 0..found.len() {
            for j in 0..i {
                let s = gen(&found[i].union(&found[j]));
                if !found.contains(&s) {
                    found.push(s);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    found.sort();
    found
}
