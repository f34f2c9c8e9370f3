//! Seeded generators for random finite instances.
//!
//! - semimetrics: shortest-path closure of a random symmetric weight
//!   matrix, which guarantees the triangle inequality;
//! - ultrametrics: a random chain of refining partitions with decreasing
//!   radii, distance = radius of the coarsest level that separates;
//! - reflexive symmetric relations: a random bit matrix, symmetrized, plus `Δ`;
//! - bases: drawn from semimetric, ultrametric and equivalence-relation
//!   constructions, so every generated family is a valid base.
//!
//! The same seed always yields the same sequence of instances.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::Rational;
use crate::metrics::{QParam, SemiMetric};
use crate::relation::{Partition, Relation};
use crate::set::ElementSet;
use crate::uniformity::UniformityBase;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    /// A carrier size in `1..=max`.
    pub fn size(&mut self, max: usize) -> usize {
        1 + self.below(max)
    }

    pub fn relation(&mut self, n: usize) -> Relation {
        let density = self.rng.gen_range(0.1..0.7);
        let bits: Vec<bool> = (0..n * n).map(|_| self.rng.gen_bool(density)).collect();
        Relation::from_fn(n, |i, j| bits[i * n + j])
    }

    pub fn reflexive_symmetric(&mut self, n: usize) -> Relation {
        let r = self.relation(n);
        let s = r.union(&r.inverse()).expect("same carrier");
        s.union(&Relation::diagonal(n)).expect("same carrier")
    }

    pub fn subset(&mut self, n: usize) -> ElementSet {
        let mut s = ElementSet::empty(n);
        for i in 0..n {
            if self.coin() {
                s.insert(i);
            }
        }
        s
    }

    pub fn nonempty_subset(&mut self, n: usize) -> ElementSet {
        let mut s = self.subset(n);
        if s.is_empty() {
            s.insert(self.below(n));
        }
        s
    }

    /// A total map from `0..n` into `0..m`.
    pub fn map(&mut self, n: usize, m: usize) -> Vec<usize> {
        (0..n).map(|_| self.below(m)).collect()
    }

    pub fn partition(&mut self, n: usize) -> Partition {
        let k = self.size(n);
        let labels: Vec<usize> = (0..n).map(|_| self.below(k)).collect();
        partition_from_labels(&labels)
    }

    /// Refines `p` by splitting each block at random.
    fn refine(&mut self, p: &Partition) -> Partition {
        let n = p.size();
        let mut labels = vec![0; n];
        let mut next = 0;
        for b in p.blocks() {
            let parts = 1 + self.below(b.len().min(3));
            for x in b.iter() {
                labels[x] = next + self.below(parts);
            }
            next += parts;
        }
        partition_from_labels(&labels)
    }

    pub fn semimetric(&mut self, n: usize) -> SemiMetric {
        let mut d: Vec<Vec<Rational>> = vec![vec![Rational::from_integer(0.into()); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let w = Rational::new(BigInt::from(self.rng.gen_range(0..=12)), BigInt::from(self.rng.gen_range(1..=4)));
                d[i][j] = w.clone();
                d[j][i] = w;
            }
        }
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
        SemiMetric::new(d, QParam::one()).expect("shortest-path closure satisfies the triangle inequality")
    }

    pub fn ultrametric(&mut self, n: usize) -> SemiMetric {
        let levels = 1 + self.below(3);
        let mut chain = vec![Partition::from_lists(n, &[(0..n).collect()]).expect("one block")];
        for _ in 0..levels {
            let next = self.refine(chain.last().expect("nonempty"));
            chain.push(next);
        }
        // radius of level k, strictly decreasing in k
        let mut radii = Vec::with_capacity(levels);
        let mut r = Rational::from_integer(BigInt::from(self.rng.gen_range(4..=9)));
        for _ in 0..levels {
            radii.push(r.clone());
            r = &r * Rational::new(BigInt::from(1), BigInt::from(self.rng.gen_range(2..=3)));
        }
        let block_maps: Vec<Vec<usize>> = chain.iter().map(|p| p.block_of()).collect();
        SemiMetric::from_fn(n, QParam::Inf, |i, j| {
            (1..chain.len())
                .find(|&k| block_maps[k][i] != block_maps[k][j])
                .map(|k| radii[k - 1].clone())
                .unwrap_or_else(|| Rational::from_integer(0.into()))
        })
        .expect("laminar construction is ultrametric")
    }

    /// A random valid base on `n` points.
    pub fn base(&mut self, n: usize) -> UniformityBase {
        match self.below(5) {
            0 | 1 => UniformityBase::from_semimetric(&self.semimetric(n)),
            2 => UniformityBase::from_semimetric(&self.ultrametric(n)),
            3 => {
                let k = 1 + self.below(3);
                let sub = (0..k).map(|_| self.partition(n).to_relation()).collect();
                UniformityBase::from_subbase(sub).expect("equivalence relations form a sub-base")
            }
            _ => {
                let d = crate::metrics::max_combine(&[self.semimetric(n), self.ultrametric(n)]).expect("same carrier");
                UniformityBase::from_semimetric(&d)
            }
        }
    }

    /// A small rational with height at most `h`.
    pub fn rational(&mut self, h: i64) -> Rational {
        Rational::new(BigInt::from(self.rng.gen_range(-h..=h)), BigInt::from(self.rng.gen_range(1..=h)))
    }
}

pub fn partition_from_labels(labels: &[usize]) -> Partition {
    let n = labels.len();
    let mut blocks: Vec<ElementSet> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (x, &l) in labels.iter().enumerate() {
        match seen.iter().position(|&s| s == l) {
            Some(k) => blocks[k].insert(x),
            None => {
                seen.push(l);
                blocks.push(ElementSet::singleton(n, x));
            }
        }
    }
    Partition::new(n, blocks).expect("labels induce a partition")
}
