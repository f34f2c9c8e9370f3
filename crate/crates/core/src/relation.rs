//! Binary relations on a finite carrier and the operations used to build
//! entourages: composition, inversion, images, chain powers and the
//! chain closure `Û`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::set::{words_for, ElementSet, WORD};
use crate::{Error, Result};

/// Largest carrier the dense representation accepts.
pub const MAX_SPACE: usize = 4096;

/// An indexed finite carrier, optionally with element names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceJson", into = "SpaceJson")]
pub struct FiniteSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<SpaceJson> for FiniteSpace {
    type Error = Error;
    fn try_from(j: SpaceJson) -> Result<Self> {
        match j.labels {
            Some(l) => FiniteSpace::with_labels(l).and_then(|s| {
                if s.size == j.size {
                    Ok(s)
                } else {
                    Err(Error::InvalidLabels { expected: j.size })
                }
            }),
            None => FiniteSpace::new(j.size),
        }
    }
}

impl From<FiniteSpace> for SpaceJson {
    fn from(s: FiniteSpace) -> Self {
        SpaceJson { size: s.size, labels: s.labels }
    }
}

impl FiniteSpace {
    pub fn new(size: usize) -> Result<Self> {
        check_size(size)?;
        Ok(FiniteSpace { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        check_size(labels.len())?;
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLabels { expected: labels.len() });
        }
        Ok(FiniteSpace { size: labels.len(), labels: Some(labels) })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }
}

pub(crate) fn check_size(size: usize) -> Result<()> {
    if size == 0 || size > MAX_SPACE {
        Err(Error::SpaceSize(size))
    } else {
        Ok(())
    }
}

/// A subset of `X × X`, stored as a dense row-major bit matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RelationJson", into = "RelationJson")]
pub struct Relation {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

/// Wire form: `{"size": n, "pairs": [[i, j], ...]}`, pairs sorted.
#[derive(Serialize, Deserialize)]
pub struct RelationJson {
    pub size: usize,
    pub pairs: Vec<[usize; 2]>,
}

impl TryFrom<RelationJson> for Relation {
    type Error = Error;
    fn try_from(j: RelationJson) -> Result<Self> {
        check_size(j.size)?;
        Relation::from_pairs(j.size, j.pairs.iter().map(|p| (p[0], p[1])))
    }
}

impl From<Relation> for RelationJson {
    fn from(r: Relation) -> Self {
        RelationJson { size: r.n, pairs: r.pairs().map(|(i, j)| [i, j]).collect() }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation[{}]", self.n)?;
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// Reflexivity, symmetry and transitivity of a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub reflexive: bool,
    pub symmetric: bool,
    pub transitive: bool,
    pub is_equivalence: bool,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let stride = words_for(n);
        Relation { n, stride, bits: vec![0; n * stride] }
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                r.insert(i, j);
            }
        }
        r
    }

    /// The diagonal `Δ = {(x, x)}`.
    pub fn diagonal(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Result<Self> {
        let mut r = Self::empty(n);
        for (i, j) in pairs {
            for k in [i, j] {
                if k >= n {
                    return Err(Error::IndexOutOfRange { index: k, size: n });
                }
            }
            r.insert(i, j);
        }
        Ok(r)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    r.insert(i, j);
                }
            }
        }
        r
    }

    /// `A × B` as a relation.
    pub fn rectangle(a: &ElementSet, b: &ElementSet) -> Self {
        assert_eq!(a.universe(), b.universe());
        let mut r = Self::empty(a.universe());
        for i in a.iter() {
            r.row_words_mut(i).copy_from_slice(b.words());
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.bits[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n);
        self.bits[i * self.stride + j / WORD] |= 1 << (j % WORD);
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        if i < self.n && j < self.n {
            self.bits[i * self.stride + j / WORD] &= !(1 << (j % WORD));
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.bits[i * self.stride..(i + 1) * self.stride]
    }

    /// `U[x]`.
    pub fn row(&self, i: usize) -> ElementSet {
        ElementSet::from_words(self.n, self.row_words(i).to_vec())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).iter().map(move |j| (i, j)).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::SpaceMismatch { left: self.n, right: other.n })
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(self.zip(other, |a, b| a & b))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(self.zip(other, |a, b| a | b))
    }

    /// `(X × X) ∖ U`.
    pub fn complement(&self) -> Self {
        Self::full(self.n).zip(self, |a, b| a & !b)
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        Relation {
            n: self.n,
            stride: self.stride,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `Ũ = {(x, y) : (y, x) ∈ U}`.
    pub fn inverse(&self) -> Self {
        let mut r = Self::empty(self.n);
        for (i, j) in self.pairs() {
            r.insert(j, i);
        }
        r
    }

    /// `U * V`: pairs `(x, z)` with a middle point `y`, `(x, y) ∈ U`, `(y, z) ∈ V`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let mut out = Self::empty(self.n);
        for i in 0..self.n {
            let mut acc = vec![0u64; self.stride];
            for y in self.row(i).iter() {
                for (a, b) in acc.iter_mut().zip(other.row_words(y)) {
                    *a |= b;
                }
            }
            out.row_words_mut(i).copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// `U[A] = ⋃_{x ∈ A} U[x]`.
    pub fn image(&self, a: &ElementSet) -> Result<ElementSet> {
        if a.universe() != self.n {
            return Err(Error::SpaceMismatch { left: self.n, right: a.universe() });
        }
        let mut out = ElementSet::empty(self.n);
        for x in a.iter() {
            for (o, w) in out.words_mut().iter_mut().zip(self.row_words(x)) {
                *o |= w;
            }
        }
        Ok(out)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(i, j)| self.contains(j, i))
    }

    pub fn is_transitive(&self) -> bool {
        // same space by construction
        self.compose(self).map(|c| c.is_subset(self)).unwrap_or(false)
    }

    pub fn classify(&self) -> Classification {
        let reflexive = self.is_reflexive();
        let symmetric = self.is_symmetric();
        let transitive = self.is_transitive();
        Classification {
            reflexive,
            symmetric,
            transitive,
            is_equivalence: reflexive && symmetric && transitive,
        }
    }

    fn require_reflexive_symmetric(&self) -> Result<()> {
        if self.is_reflexive() && self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::NotReflexiveSymmetric)
        }
    }

    /// `U^n`: endpoints of U-chains with `n + 1` points; `U^0 = Δ`.
    pub fn power(&self, n: u64) -> Result<Self> {
        self.require_reflexive_symmetric()?;
        let mut result = Self::diagonal(self.n);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base)?;
            }
            k >>= 1;
            if k > 0 {
                let sq = base.compose(&base)?;
                if sq == base {
                    // powers of a reflexive relation stabilise once U*U = U
                    return result.compose(&base);
                }
                base = sq;
            }
        }
        Ok(result)
    }

    /// `Û = ⋃ U^n`, the least equivalence relation containing `U`.
    pub fn hat_closure(&self) -> Result<Self> {
        self.require_reflexive_symmetric()?;
        let mut cur = self.clone();
        loop {
            let next = cur.compose(&cur)?;
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }

    /// `U ∩ Ũ`.
    pub fn symmetrize(&self) -> Self {
        self.zip(&self.inverse(), |a, b| a & b)
    }

    /// `U ∩ (E × E)`.
    pub fn restrict(&self, e: &ElementSet) -> Self {
        let mut out = Self::empty(self.n);
        for i in e.iter() {
            for (o, (w, m)) in out.row_words_mut(i).iter_mut().zip(self.row_words(i).iter().zip(e.words())) {
                *o = w & m;
            }
        }
        out
    }

    /// The classes of an equivalence relation, ordered by least element.
    pub fn equivalence_classes(&self) -> Result<Partition> {
        if !self.classify().is_equivalence {
            return Err(Error::NotEquivalence);
        }
        let mut seen = ElementSet::empty(self.n);
        let mut blocks = Vec::new();
        for i in 0..self.n {
            if !seen.contains(i) {
                let b = self.row(i);
                seen.union_with(&b);
                blocks.push(b);
            }
        }
        Ok(Partition { n: self.n, blocks })
    }

    /// `f₂⁻¹(U) = {(x, x') : (f(x), f(x')) ∈ U}` for `f` from a carrier of size `f.len()`.
    pub fn preimage(&self, f: &[usize]) -> Result<Self> {
        check_map(f, self.n)?;
        Ok(Self::from_fn(f.len(), |i, j| self.contains(f[i], f[j])))
    }

    /// `f₂(U) = {(f(x), f(x'))}` into a carrier of size `target`.
    pub fn push_forward(&self, f: &[usize], target: usize) -> Result<Self> {
        check_map(f, target)?;
        if f.len() != self.n {
            return Err(Error::SpaceMismatch { left: self.n, right: f.len() });
        }
        let mut out = Self::empty(target);
        for (i, j) in self.pairs() {
            out.insert(f[i], f[j]);
        }
        Ok(out)
    }
}

pub(crate) fn check_map(f: &[usize], target: usize) -> Result<()> {
    match f.iter().find(|&&y| y >= target) {
        Some(&index) => Err(Error::MapOutOfRange { index, size: target }),
        None => Ok(()),
    }
}

/// `U_A = (A × A) ∪ ((X ∖ A) × (X ∖ A))`.
pub fn u_a(a: &ElementSet) -> Relation {
    let rest = a.complement();
    let mut r = Relation::rectangle(a, a);
    let s = Relation::rectangle(&rest, &rest);
    r.bits.iter_mut().zip(&s.bits).for_each(|(x, y)| *x |= y);
    r
}

/// A partition of a finite carrier into nonempty blocks, kept in canonical
/// order (by least element).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<ElementSet>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<ElementSet>) -> Result<Self> {
        let mut covered = ElementSet::empty(n);
        for b in &blocks {
            if b.universe() != n {
                return Err(Error::SpaceMismatch { left: n, right: b.universe() });
            }
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if !covered.is_disjoint(b) {
                return Err(Error::InvalidPartition("overlapping blocks".into()));
            }
            covered.union_with(b);
        }
        if !covered.is_full() {
            return Err(Error::InvalidPartition("blocks do not cover the carrier".into()));
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.first());
        Ok(Partition { n, blocks })
    }

    pub fn from_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let blocks = lists
            .iter()
            .map(|l| ElementSet::from_indices(n, l.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, blocks)
    }

    pub fn singletons(n: usize) -> Self {
        Partition { n, blocks: (0..n).map(|i| ElementSet::singleton(n, i)).collect() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[ElementSet] {
        &self.blocks
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.to_vec()).collect()
    }

    /// The equivalence relation whose classes are the blocks.
    pub fn to_relation(&self) -> Relation {
        let mut r = Relation::empty(self.n);
        for b in &self.blocks {
            for i in b.iter() {
                r.row_words_mut(i).copy_from_slice(b.words());
            }
        }
        r
    }

    /// Block index of every element.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for i in b.iter() {
                out[i] = k;
            }
        }
        out
    }
}
