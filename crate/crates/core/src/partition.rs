//! Set partitions of `k` upper and `l` lower points, word kernels and
//! restricted-growth enumeration.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::diagram::BilabelledGraph;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexPartition};

/// Default bound on the point count for [`enumerate_partitions`].
pub const DEFAULT_PARTITION_BOUND: usize = 10;

/// A partition of `k` upper and `l` lower points. Points `0..k` are the upper
/// row, `k..k+l` the lower row.
///
/// Block ids are canonical: nonempty blocks are numbered by first occurrence,
/// empty blocks come last. Two partitions are equal iff their fields are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[derive(Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct SetPartition {
    k: usize,
    l: usize,
    block_of: Vec<usize>,
    num_blocks: usize,
}

impl SetPartition {
    /// Builds a partition from arbitrary block labels, adding `empty_blocks`
    /// blocks that contain no point.
    pub fn from_labels(k: usize, l: usize, labels: &[usize], empty_blocks: usize) -> Result<Self> {
        if labels.len() != k + l {
            return Err(Error::validation(format!(
                "{} block labels for {} points",
                labels.len(),
                k + l
            )));
        }
        let mut ids = HashMap::new();
        let block_of: Vec<usize> = labels
            .iter()
            .map(|label| {
                let next = ids.len();
                *ids.entry(*label).or_insert(next)
            })
            .collect();
        Ok(SetPartition {
            k,
            l,
            block_of,
            num_blocks: ids.len() + empty_blocks,
        })
    }

    /// Builds a partition from explicit blocks (JSON layout). Empty blocks are allowed.
    pub fn from_blocks(k: usize, l: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; k + l];
        let mut empty = 0;
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                empty += 1;
            }
            for &p in block {
                if p >= k + l {
                    return Err(Error::validation(format!(
                        "point {p} out of range for {k}+{l} points"
                    )));
                }
                if labels[p] != usize::MAX {
                    return Err(Error::validation(format!("point {p} lies in two blocks")));
                }
                labels[p] = b;
            }
        }
        if let Some(p) = labels.iter().position(|&b| b == usize::MAX) {
            return Err(Error::validation(format!("point {p} lies in no block")));
        }
        SetPartition::from_labels(k, l, &labels, empty)
    }

    pub fn upper(&self) -> usize {
        self.k
    }

    pub fn lower(&self) -> usize {
        self.l
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    /// Number of blocks that contain no point.
    pub fn empty_blocks(&self) -> usize {
        self.num_blocks - self.block_of.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks as sorted point lists, in block id order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks];
        for (p, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(p);
        }
        blocks
    }

    /// The identity partition on `k` points: upper point `i` with lower point `i`.
    pub fn identity(k: usize) -> Self {
        let labels: Vec<usize> = (0..k).chain(0..k).collect();
        SetPartition::from_labels(k, k, &labels, 0).expect("lengths agree")
    }

    /// One block holding `k` upper and `l` lower points.
    pub fn single_block(k: usize, l: usize) -> Self {
        SetPartition::from_labels(k, l, &vec![0; k + l], usize::from(k + l == 0))
            .expect("lengths agree")
    }

    /// Horizontal concatenation.
    pub fn tensor(&self, other: &SetPartition) -> SetPartition {
        let shift = self.num_blocks;
        let labels: Vec<usize> = self.block_of[..self.k]
            .iter()
            .copied()
            .chain(other.block_of[..other.k].iter().map(|b| b + shift))
            .chain(self.block_of[self.k..].iter().copied())
            .chain(other.block_of[other.k..].iter().map(|b| b + shift))
            .collect();
        let mut p = SetPartition::from_labels(self.k + other.k, self.l + other.l, &labels, 0)
            .expect("lengths agree");
        p.num_blocks = self.num_blocks + other.num_blocks;
        p
    }

    /// `other · self`: stack `other` below `self`, joining blocks through the
    /// middle row. Blocks that lose all their points survive as empty blocks.
    pub fn compose(&self, other: &SetPartition) -> Result<SetPartition> {
        if self.l != other.k {
            return Err(Error::Arity(format!(
                "cannot compose: {} lower points against {} upper points",
                self.l, other.k
            )));
        }
        let shift = self.num_blocks;
        let pairs: Vec<(usize, usize)> = (0..self.l)
            .map(|i| (self.block_of[self.k + i], other.block_of[i] + shift))
            .collect();
        let joined = VertexPartition::generated_by(self.num_blocks + other.num_blocks, &pairs)?;
        let q = joined.projection();
        let labels: Vec<usize> = self.block_of[..self.k]
            .iter()
            .map(|&b| q.apply(b))
            .chain(other.block_of[other.k..].iter().map(|&b| q.apply(b + shift)))
            .collect();
        let mut p = SetPartition::from_labels(self.k, other.l, &labels, 0)?;
        p.num_blocks = joined.num_blocks();
        Ok(p)
    }

    /// Vertical reflection.
    pub fn involution(&self) -> SetPartition {
        let labels: Vec<usize> = self.block_of[self.k..]
            .iter()
            .chain(self.block_of[..self.k].iter())
            .copied()
            .collect();
        SetPartition::from_labels(self.l, self.k, &labels, self.empty_blocks())
            .expect("lengths agree")
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    k: usize,
    l: usize,
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<PartitionRepr> for SetPartition {
    type Error = Error;
    fn try_from(repr: PartitionRepr) -> Result<Self> {
        SetPartition::from_blocks(repr.k, repr.l, &repr.blocks)
    }
}

impl From<SetPartition> for PartitionRepr {
    fn from(p: SetPartition) -> Self {
        PartitionRepr {
            k: p.k,
            l: p.l,
            blocks: p.blocks(),
        }
    }
}

/// `ker(a, b)`: upper points carry `a`, lower points carry `b`; points share a
/// block iff their symbols agree.
pub fn ker<T: Eq + Hash>(a: &[T], b: &[T]) -> SetPartition {
    let mut ids: HashMap<&T, usize> = HashMap::new();
    let block_of: Vec<usize> = a
        .iter()
        .chain(b.iter())
        .map(|s| {
            let next = ids.len();
            *ids.entry(s).or_insert(next)
        })
        .collect();
    SetPartition {
        k: a.len(),
        l: b.len(),
        num_blocks: ids.len(),
        block_of,
    }
}

/// All partitions of `m` points as restricted-growth strings, in
/// lexicographic order. The result has Bell(m) entries.
pub fn enumerate_partitions(m: usize) -> Result<Vec<SetPartition>> {
    enumerate_partitions_bounded(m, DEFAULT_PARTITION_BOUND)
}

pub fn enumerate_partitions_bounded(m: usize, bound: usize) -> Result<Vec<SetPartition>> {
    if m > bound {
        return Err(Error::capacity("partition point count", m, bound));
    }
    Ok(restricted_growth_strings(m)
        .into_iter()
        .map(|rgs| {
            let num_blocks = rgs.iter().max().map_or(0, |b| b + 1);
            SetPartition {
                k: 0,
                l: m,
                block_of: rgs,
                num_blocks,
            }
        })
        .collect())
}

/// Restricted-growth strings of length `m`: `s[0] = 0`, `s[i] <= 1 + max(s[..i])`.
pub(crate) fn restricted_growth_strings(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    fn rec(m: usize, max_plus_one: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == m {
            out.push(current.clone());
            return;
        }
        for b in 0..=max_plus_one {
            current.push(b);
            rec(m, max_plus_one.max(b + 1), current, out);
            current.pop();
        }
    }
    rec(m, 0, &mut current, &mut out);
    out
}

/// `P ↦ (N_b, a, b)` with one isolated vertex per block, empty blocks included.
pub fn partition_to_bilabelled(p: &SetPartition) -> BilabelledGraph {
    BilabelledGraph::new(
        Graph::edgeless(p.num_blocks),
        p.block_of[..p.k].to_vec(),
        p.block_of[p.k..].to_vec(),
    )
    .expect("block ids are vertices")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_by_brute_force(m: usize) -> usize {
        // count distinct kernels of all words of length m over m symbols
        let mut kernels = std::collections::HashSet::new();
        let total = m.pow(m as u32).max(1);
        for code in 0..total {
            let mut c = code;
            let word: Vec<usize> = (0..m)
                .map(|_| {
                    let s = c % m.max(1);
                    c /= m.max(1);
                    s
                })
                .collect();
            kernels.insert(ker::<usize>(&[], &word));
        }
        kernels.len()
    }

    #[test]
    fn ker_of_a_mixed_pair() {
        let p = ker(&['a', 'a', 'a'], &['b', 'a', 'a', 'c']);
        assert_eq!(p.upper(), 3);
        assert_eq!(p.lower(), 4);
        assert_eq!(p.block_of(), &[0, 0, 0, 1, 0, 0, 2]);
        assert_eq!(p.num_blocks(), 3);
        assert_eq!(p.blocks(), vec![vec![0, 1, 2, 4, 5], vec![3], vec![6]]);
    }

    #[test]
    fn ker_edge_cases() {
        let empty = ker::<char>(&[], &[]);
        assert_eq!(empty.num_blocks(), 0);
        let p = ker(&['a', 'b'], &['b', 'a']);
        assert_eq!(p.blocks(), vec![vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        for (m, bell) in [1usize, 1, 2, 5, 15, 52].into_iter().enumerate() {
            assert_eq!(enumerate_partitions(m).unwrap().len(), bell);
        }
        assert_eq!(enumerate_partitions(3).unwrap().len(), bell_by_brute_force(3));
        assert_eq!(enumerate_partitions(4).unwrap().len(), bell_by_brute_force(4));
        let zero = enumerate_partitions(0).unwrap();
        assert_eq!(zero[0].num_blocks(), 0);
        assert!(matches!(enumerate_partitions(11), Err(Error::Capacity { .. })));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let parts = enumerate_partitions(4).unwrap();
        assert!(parts.windows(2).all(|w| w[0].block_of() < w[1].block_of()));
    }

    #[test]
    fn embedding_examples() {
        let id = partition_to_bilabelled(&SetPartition::identity(1));
        assert_eq!(id, BilabelledGraph::identity());
        let pair = partition_to_bilabelled(&SetPartition::single_block(0, 2));
        assert_eq!(pair, BilabelledGraph::pair());
        let cross = partition_to_bilabelled(&ker(&['a', 'b'], &['b', 'a']));
        assert_eq!(cross.graph(), &Graph::edgeless(2));
        assert_eq!(cross.inputs(), &[0, 1]);
        assert_eq!(cross.outputs(), &[1, 0]);
    }

    #[test]
    fn empty_blocks_survive_embedding_and_json() {
        let p = SetPartition::from_blocks(1, 1, &[vec![0, 1], vec![]]).unwrap();
        assert_eq!(p.empty_blocks(), 1);
        assert_eq!(partition_to_bilabelled(&p).graph().vertex_count(), 2);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"k":1,"l":1,"blocks":[[0,1],[]]}"#);
        assert_eq!(serde_json::from_str::<SetPartition>(&text).unwrap(), p);
        assert!(serde_json::from_str::<SetPartition>(r#"{"k":1,"l":1,"blocks":[[0]]}"#).is_err());
    }

    #[test]
    fn composition_joins_through_middle_row() {
        // P = ker(aaa, baac), Q = ker(abcd, ecbb)
        let p = ker(&['a', 'a', 'a'], &['b', 'a', 'a', 'c']);
        let q = ker(&['a', 'b', 'c', 'd'], &['e', 'c', 'b', 'b']);
        let qp = p.compose(&q).unwrap();
        // P's middle blocks {b}, {a}, {c} meet Q's {a}, {b,c-with-ker}, {d}:
        // a-block of P touches Q-blocks b and c, which carry lower points 2,3,4.
        assert_eq!(qp.upper(), 3);
        assert_eq!(qp.lower(), 4);
        assert_eq!(qp.block_of(), &[0, 0, 0, 1, 0, 0, 0]);
        // P-block {b} and Q-block {a} merge into an empty block, and so do
        // P-block {c} with Q-block {d}.
        assert_eq!(qp.empty_blocks(), 2);
    }

    #[test]
    fn involution_and_tensor() {
        let p = ker(&['a', 'b'], &['b', 'b', 'c']);
        assert_eq!(p.involution().involution(), p);
        assert_eq!(p.involution(), ker(&['b', 'b', 'c'], &['a', 'b']));
        let id = SetPartition::identity(1);
        assert_eq!(id.tensor(&id), SetPartition::identity(2));
        assert_eq!(id.compose(&id).unwrap(), id);
        assert!(id.compose(&SetPartition::identity(2)).is_err());
    }
}
