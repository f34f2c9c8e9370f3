//! Separation and chain connectedness.
//!
//! A set `E` is chain connected when it is `U`-connected for every
//! symmetric entourage `U`. Only symmetrized base elements `U ∩ Ũ` need to
//! be checked: every symmetric member of the uniformity contains some base
//! element `U`, hence contains `U ∩ Ũ`, and `V`-connected with `V ⊆ W`
//! implies `W`-connected.
//!
//! On a finite carrier every subset is compact, so the compactness
//! hypotheses used for uniform separation and for "chain connected implies
//! connected" always hold.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::exact::{int, Rational};
use crate::relation::{u_a, Relation};
use crate::set::ElementSet;
use crate::uniformity::{check_enumerable, UniformityBase};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationKind {
    USeparated,
    UniformlySeparated,
    Split,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationWitness {
    pub kind: SeparationKind,
    pub u: Option<Relation>,
    pub parts: Option<(ElementSet, ElementSet)>,
}

/// A finite sequence `x_1, .., x_n` with consecutive pairs in the entourage
/// it was issued against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainWitness {
    pub points: Vec<usize>,
}

impl ChainWitness {
    pub fn is_chain_in(&self, u: &Relation) -> bool {
        !self.points.is_empty() && self.points.windows(2).all(|w| u.contains(w[0], w[1]))
    }
}

/// Whether `U ∩ (A × B) = ∅`, for `U ⊇ Δ`.
pub fn u_separated(a: &ElementSet, b: &ElementSet, u: &Relation) -> Result<bool> {
    if !u.is_reflexive() {
        return Err(Error::NotReflexive);
    }
    Ok(u.image(a)?.is_disjoint(b))
}

/// A base element `U` with `A, B` `U`-separated, if any.
pub fn uniformly_separated(a: &ElementSet, b: &ElementSet, base: &UniformityBase) -> Option<SeparationWitness> {
    base.elements().iter().find(|u| u.image(a).map(|img| img.is_disjoint(b)).unwrap_or(false)).map(|u| {
        SeparationWitness {
            kind: SeparationKind::UniformlySeparated,
            u: Some(u.clone()),
            parts: Some((a.clone(), b.clone())),
        }
    })
}

fn require_refl_sym(u: &Relation) -> Result<()> {
    if u.is_reflexive() && u.is_symmetric() {
        Ok(())
    } else {
        Err(Error::NotReflexiveSymmetric)
    }
}

/// A shortest `U`-chain from `x` to `y`, found by breadth-first search.
pub fn find_chain(x: usize, y: usize, u: &Relation) -> Result<Option<ChainWitness>> {
    require_refl_sym(u)?;
    let n = u.size();
    for i in [x, y] {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, size: n });
        }
    }
    let mut prev = vec![usize::MAX; n];
    prev[x] = x;
    let mut queue = VecDeque::from([x]);
    while let Some(p) = queue.pop_front() {
        if p == y {
            let mut points = vec![y];
            let mut c = y;
            while c != x {
                c = prev[c];
                points.push(c);
            }
            points.reverse();
            return Ok(Some(ChainWitness { points }));
        }
        for q in u.row(p).iter() {
            if prev[q] == usize::MAX {
                prev[q] = p;
                queue.push_back(q);
            }
        }
    }
    Ok(None)
}

fn components_unchecked(e: &ElementSet, u: &Relation) -> Vec<ElementSet> {
    let r = u.restrict(e);
    let mut left = e.clone();
    let mut out = Vec::new();
    while let Some(start) = left.first() {
        let mut comp = ElementSet::singleton(e.universe(), start);
        let mut frontier = comp.clone();
        while !frontier.is_empty() {
            let next = r.image(&frontier).expect("same carrier").difference(&comp);
            comp.union_with(&next);
            frontier = next;
        }
        left = left.difference(&comp);
        out.push(comp);
    }
    out
}

/// Classes of `E` under chains inside `E`, ordered by least element.
pub fn chain_components(e: &ElementSet, u: &Relation) -> Result<Vec<ElementSet>> {
    require_refl_sym(u)?;
    if e.universe() != u.size() {
        return Err(Error::SpaceMismatch { left: u.size(), right: e.universe() });
    }
    Ok(components_unchecked(e, u))
}

/// Where chain connectedness breaks: the symmetrized base element and the
/// split `(first component, rest)` it induces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainBreak {
    pub element: usize,
    pub relation: Relation,
    pub split: (ElementSet, ElementSet),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainConnectivity {
    pub connected: bool,
    pub witness: Option<ChainBreak>,
}

pub fn is_chain_connected(e: &ElementSet, base: &UniformityBase) -> ChainConnectivity {
    for (k, u) in base.elements().iter().enumerate() {
        let s = u.symmetrize();
        let comps = components_unchecked(e, &s);
        if comps.len() > 1 {
            let first = comps[0].clone();
            let rest = e.difference(&first);
            return ChainConnectivity {
                connected: false,
                witness: Some(ChainBreak { element: k, relation: s, split: (first, rest) }),
            };
        }
    }
    ChainConnectivity { connected: true, witness: None }
}

/// Nonempty uniformly separated `A, B` with `E = A ∪ B`, or `None` exactly
/// when `E` is chain connected.
pub fn separated_split(e: &ElementSet, base: &UniformityBase) -> Option<(ElementSet, ElementSet)> {
    is_chain_connected(e, base).witness.map(|w| w.split)
}

/// All `A` with `U_A` in the uniformity, i.e. `A` uniformly separated from
/// its complement, in subset-mask order.
pub fn self_separated_sets(base: &UniformityBase) -> Result<Vec<ElementSet>> {
    let n = base.size();
    check_enumerable(n)?;
    Ok(ElementSet::all_subsets(n).filter(|a| is_self_separated(a, base)).collect())
}

pub fn is_self_separated(a: &ElementSet, base: &UniformityBase) -> bool {
    base.contains(&u_a(a)).expect("same carrier")
}

/// Dimension-zero and total-separation flags of a finite uniform space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dim0Report {
    /// The uniformity has a base of equivalence relations.
    pub uniformly_zero_dimensional: bool,
    /// Per point: a local base of sets uniformly separated from their complements.
    pub strongly_zero_dimensional_at: Vec<bool>,
    pub strongly_zero_dimensional: bool,
    /// Every point has a local base of clopen sets.
    pub topological_dimension_zero: bool,
    pub strongly_totally_separated: bool,
    pub totally_separated: bool,
    pub hausdorff: bool,
}

impl Dim0Report {
    /// uniformly ⟹ strongly ⟹ dim 0, and strongly totally separated ⟹
    /// totally separated ⟹ Hausdorff.
    pub fn implications_hold(&self) -> bool {
        (!self.uniformly_zero_dimensional || self.strongly_zero_dimensional)
            && (!self.strongly_zero_dimensional || self.topological_dimension_zero)
            && (!self.strongly_totally_separated || self.totally_separated)
            && (!self.totally_separated || self.hausdorff)
    }
}

pub fn dim0_report(base: &UniformityBase) -> Result<Dim0Report> {
    let n = base.size();
    let topology = base.topology()?;
    let eq = base.eq_base();
    let uniformly_zero_dimensional =
        base.elements().iter().all(|u| eq.elements().iter().any(|e| e.is_subset(u)));

    // A local base at x must reach down to the smallest open set N(x); any
    // member S has x ∈ int(S) ⊇ N(x) and S ⊆ N(x), so S = N(x).
    let minimal: Vec<ElementSet> = (0..n).map(|x| topology.minimal_open(x)).collect();
    let strongly_zero_dimensional_at: Vec<bool> = minimal.iter().map(|m| is_self_separated(m, base)).collect();
    let strongly_zero_dimensional = strongly_zero_dimensional_at.iter().all(|&b| b);
    let topological_dimension_zero = minimal.iter().all(|m| topology.is_clopen(m));

    // points are split by a family closed under complements iff the
    // intersection of the members containing x is {x}
    let separated_by = |family: &[ElementSet]| {
        (0..n).all(|x| {
            let mut atom = ElementSet::full(n);
            for s in family.iter().filter(|s| s.contains(x)) {
                atom.intersect_with(s);
            }
            atom.len() == 1
        })
    };
    let self_sep = self_separated_sets(base)?;
    let clopens: Vec<ElementSet> = topology.opens().iter().filter(|o| topology.is_closed(o)).cloned().collect();
    let report = Dim0Report {
        uniformly_zero_dimensional,
        strongly_zero_dimensional_at,
        strongly_zero_dimensional,
        topological_dimension_zero,
        strongly_totally_separated: separated_by(&self_sep),
        totally_separated: separated_by(&clopens),
        hausdorff: base.is_hausdorff(),
    };
    debug_assert!(report.implications_hold());
    Ok(report)
}

/// A chain of rationals from `a` to `b` with consecutive gaps `< r`, using
/// steps of `r/2` (the last one possibly shorter).
pub fn rational_r_chain(a: &Rational, b: &Rational, r: &Rational) -> Result<Vec<Rational>> {
    if !r.is_positive() {
        return Err(Error::Parse("chain radius must be positive".into()));
    }
    let step = r / int(2);
    let gap = (b - a).abs();
    if gap.is_zero() {
        return Ok(vec![a.clone()]);
    }
    let steps = (&gap / &step).ceil().to_integer();
    let steps: usize = steps.try_into().map_err(|_| Error::Parse("chain too long".into()))?;
    let signed = if b > a { step } else { -step };
    let mut points: Vec<Rational> = (0..steps).map(|k| a + &signed * int(k as i64)).collect();
    points.push(b.clone());
    Ok(points)
}
