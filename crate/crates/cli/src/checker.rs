//! Brute-force oracles used by the sweep runner.
//!
//! Everything here is computed straight from the definitions, without the
//! shortcuts the library takes, so the two can be compared.

use unilab_core::{ElementSet, FiniteGroup, Relation, UniformityBase};

/// `(x, z)` with `(x, y) ∈ u` and `(y, z) ∈ v` for some `y`.
pub fn compose(u: &Relation, v: &Relation) -> Relation {
    let n = u.size();
    Relation::from_fn(n, |x, z| (0..n).any(|y| u.contains(x, y) && v.contains(y, z)))
}

pub fn image(u: &Relation, a: &ElementSet) -> ElementSet {
    let n = u.size();
    ElementSet::from_indices(n, (0..n).filter(|&y| a.iter().any(|x| u.contains(x, y)))).expect("in range")
}

/// `A` is open iff every `x ∈ A` has a base element `U` with `U[x] ⊆ A`.
pub fn opens(base: &UniformityBase) -> Vec<ElementSet> {
    let n = base.size();
    ElementSet::all_subsets(n)
        .filter(|a| {
            a.iter().all(|x| base.elements().iter().any(|u| image(u, &ElementSet::singleton(n, x)).is_subset(a)))
        })
        .collect()
}

pub fn closure(opens: &[ElementSet], a: &ElementSet) -> ElementSet {
    opens
        .iter()
        .map(|o| o.complement())
        .filter(|c| a.is_subset(c))
        .fold(ElementSet::full(a.universe()), |acc, c| acc.intersection(&c))
}

pub fn interior(opens: &[ElementSet], a: &ElementSet) -> ElementSet {
    opens.iter().filter(|o| o.is_subset(a)).fold(ElementSet::empty(a.universe()), |acc, o| acc.union(o))
}

pub fn hausdorff(opens: &[ElementSet], n: usize) -> bool {
    (0..n).all(|x| {
        (0..x).all(|y| {
            opens.iter().any(|p| p.contains(x) && opens.iter().any(|q| q.contains(y) && p.is_disjoint(q)))
        })
    })
}

/// No partition of `e` into two nonempty relatively open pieces.
pub fn connected(opens: &[ElementSet], e: &ElementSet) -> bool {
    let relative: Vec<ElementSet> = opens.iter().map(|o| o.intersection(e)).collect();
    !relative.iter().any(|a| !a.is_empty() && *a != *e && relative.contains(&e.difference(a)))
}

pub fn preimage_set(f: &[usize], s: &ElementSet) -> ElementSet {
    ElementSet::from_indices(f.len(), (0..f.len()).filter(|&x| s.contains(f[x]))).expect("in range")
}

pub fn image_set(f: &[usize], e: &ElementSet, target: usize) -> ElementSet {
    ElementSet::from_indices(target, e.iter().map(|x| f[x])).expect("in range")
}

/// Every target entourage `V` has a source entourage `U` with
/// `(x, y) ∈ U ⟹ (f x, f y) ∈ V`.
pub fn uniformly_continuous(src: &UniformityBase, f: &[usize], dst: &UniformityBase) -> bool {
    dst.elements()
        .iter()
        .all(|v| src.elements().iter().any(|u| u.pairs().all(|(x, y)| v.contains(f[x], f[y]))))
}

pub fn continuous(src_opens: &[ElementSet], f: &[usize], dst_opens: &[ElementSet]) -> bool {
    dst_opens.iter().all(|o| src_opens.contains(&preimage_set(f, o)))
}

/// `v_p(n)` for `n ≠ 0` by trial division over every factor.
pub fn valuation(p: u64, n: i64) -> i64 {
    let mut m = n.unsigned_abs();
    let mut v = 0;
    let mut d = 2;
    while m > 1 {
        while m % d == 0 {
            if d == p {
                v += 1;
            }
            m /= d;
        }
        d += 1;
    }
    v
}

/// Closure of `w ∪ {e}` under products and inverses, one element at a time.
pub fn worklist_subgroup(g: &FiniteGroup, w: &ElementSet) -> ElementSet {
    let mut s = w.clone();
    s.insert(g.identity());
    let mut work = s.to_vec();
    while let Some(x) = work.pop() {
        let mut next = vec![g.inv(x)];
        next.extend(s.iter().flat_map(|y| [g.mul(x, y), g.mul(y, x)]));
        for z in next {
            if !s.contains(z) {
                s.insert(z);
                work.push(z);
            }
        }
    }
    s
}

/// The distinct left cosets `xA`.
pub fn left_cosets(g: &FiniteGroup, a: &ElementSet) -> Vec<ElementSet> {
    let mut out: Vec<ElementSet> = (0..g.size()).map(|x| g.left_translate(x, a)).collect();
    out.sort();
    out.dedup();
    out
}

pub fn is_subgroup(g: &FiniteGroup, a: &ElementSet) -> bool {
    a.contains(g.identity())
        && a.iter().all(|x| a.contains(g.inv(x)) && a.iter().all(|y| a.contains(g.mul(x, y))))
}

pub fn is_normal(g: &FiniteGroup, a: &ElementSet) -> bool {
    is_subgroup(g, a) && (0..g.size()).all(|h| a.iter().all(|x| a.contains(g.mul(g.mul(h, x), g.inv(h)))))
}

pub fn is_equivalence(u: &Relation) -> bool {
    let n = u.size();
    (0..n).all(|x| u.contains(x, x))
        && u.pairs().all(|(x, y)| u.contains(y, x) && (0..n).all(|z| !u.contains(y, z) || u.contains(x, z)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> ElementSet {
        ElementSet::from_indices(n, xs.iter().copied()).unwrap()
    }

    #[test]
    fn valuation_by_hand() {
        assert_eq!(valuation(2, 12), 2);
        assert_eq!(valuation(3, -81), 4);
        assert_eq!(valuation(5, 7), 0);
        assert_eq!(valuation(7, 1), 0);
    }

    #[test]
    fn block_and_point_opens() {
        // One entourage, blocks {0,1} and {2}.
        let u = Relation::from_pairs(3, [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]).unwrap();
        let base = UniformityBase::new(vec![u]).unwrap();
        let mut opens = opens(&base);
        opens.sort();
        let mut expected = vec![set(3, &[]), set(3, &[2]), set(3, &[0, 1]), set(3, &[0, 1, 2])];
        expected.sort();
        assert_eq!(opens, expected);
        assert_eq!(closure(&opens, &set(3, &[0])), set(3, &[0, 1]));
        assert_eq!(interior(&opens, &set(3, &[0, 2])), set(3, &[2]));
        assert!(!hausdorff(&opens, 3));
        assert!(connected(&opens, &set(3, &[0, 1])));
        assert!(!connected(&opens, &set(3, &[1, 2])));
    }

    #[test]
    fn subgroups_of_z6() {
        let g = FiniteGroup::cyclic(6);
        let two = set(6, &[2]);
        assert_eq!(worklist_subgroup(&g, &two), set(6, &[0, 2, 4]));
        assert!(is_subgroup(&g, &set(6, &[0, 3])));
        assert!(!is_subgroup(&g, &set(6, &[0, 1])));
        assert!(is_normal(&g, &set(6, &[0, 2, 4])));
        assert_eq!(left_cosets(&g, &set(6, &[0, 3])).len(), 3);
    }

    #[test]
    fn non_normal_in_s3() {
        let g = FiniteGroup::symmetric(3);
        let t = g.index_of("(12)").unwrap();
        let h = set(6, &[g.identity(), t]);
        assert!(is_subgroup(&g, &h));
        assert!(!is_normal(&g, &h));
    }

    #[test]
    fn equivalence_check() {
        let eq = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]).unwrap();
        assert!(is_equivalence(&eq));
        let not = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1)]).unwrap();
        assert!(!is_equivalence(&not));
    }
}
