//! Partitions of `0..n`, the storage form for equivalence relations.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("element {element} is out of range (size {size})")]
    OutOfRange { element: usize, size: usize },
    #[error("element {element} appears in blocks {first} and {second}")]
    Overlap {
        element: usize,
        first: usize,
        second: usize,
    },
    #[error("element {element} is not covered by any block")]
    Uncovered { element: usize },
    #[error("block {block} is empty")]
    EmptyBlock { block: usize },
}

/// A partition of `0..len` into non-empty blocks.
///
/// Blocks are kept in canonical form: each block sorted, blocks ordered by
/// their smallest element. Two partitions of the same set are equal iff
/// they describe the same equivalence relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from explicit blocks, reporting the first
    /// violation found (scanning blocks in order).
    pub fn from_blocks(len: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut owner: Vec<Option<usize>> = vec![None; len];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock { block: b });
            }
            for &e in block {
                if e >= len {
                    return Err(PartitionError::OutOfRange { element: e, size: len });
                }
                match owner[e] {
                    Some(first) => {
                        return Err(PartitionError::Overlap {
                            element: e,
                            first,
                            second: b,
                        })
                    }
                    None => owner[e] = Some(b),
                }
            }
        }
        let keys = owner
            .iter()
            .enumerate()
            .map(|(e, o)| o.ok_or(PartitionError::Uncovered { element: e }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_keys(&keys))
    }

    /// Groups elements by equal key: `keys[e]` is the key of element `e`.
    pub fn from_keys<K: Ord + Clone>(keys: &[K]) -> Self {
        let mut numbering: BTreeMap<K, usize> = BTreeMap::new();
        let mut block_of = Vec::with_capacity(keys.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        // first-occurrence numbering keeps blocks ordered by smallest element
        for (e, k) in keys.iter().enumerate() {
            let next = blocks.len();
            let b = *numbering.entry(k.clone()).or_insert(next);
            if b == next {
                blocks.push(Vec::new());
            }
            blocks[b].push(e);
            block_of.push(b);
        }
        Partition { block_of, blocks }
    }

    /// Closes a pair set reflexively, symmetrically and transitively.
    /// The flag is true when the closure relates some pair that was not
    /// listed (ignoring reflexive and symmetric completions).
    pub fn from_pairs(len: usize, pairs: &[(usize, usize)]) -> Result<(Self, bool), PartitionError> {
        let mut uf = UnionFind::<usize>::new(len);
        for &(a, b) in pairs {
            for e in [a, b] {
                if e >= len {
                    return Err(PartitionError::OutOfRange { element: e, size: len });
                }
            }
            uf.union(a, b);
        }
        let keys: Vec<usize> = (0..len).map(|e| uf.find(e)).collect();
        let part = Self::from_keys(&keys);
        let mut listed = std::collections::BTreeSet::new();
        for &(a, b) in pairs {
            if a != b {
                listed.insert((a.min(b), a.max(b)));
            }
        }
        let implied: usize = part
            .blocks
            .iter()
            .map(|b| b.len() * (b.len() - 1) / 2)
            .sum();
        Ok((part, implied > listed.len()))
    }

    pub fn discrete(len: usize) -> Self {
        Self::from_keys(&(0..len).collect::<Vec<_>>())
    }

    pub fn indiscrete(len: usize) -> Self {
        Self::from_keys(&vec![0u8; len])
    }

    /// Number of elements partitioned.
    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn block_of(&self, e: usize) -> usize {
        self.block_of[e]
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// Common refinement: `a ~ b` iff related in both.
    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(self.len(), other.len(), "meet of partitions of different sets");
        let keys: Vec<(usize, usize)> = (0..self.len())
            .map(|e| (self.block_of[e], other.block_of[e]))
            .collect();
        Self::from_keys(&keys)
    }

    /// True iff every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.len() == other.len()
            && self.blocks.iter().all(|block| {
                let b = other.block_of[block[0]];
                block.iter().all(|&e| other.block_of[e] == b)
            })
    }

    /// True iff all blocks are singletons.
    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn from_blocks_errors() {
        assert_eq!(
            Partition::from_blocks(3, &[vec![0, 1], vec![1, 2]]),
            Err(PartitionError::Overlap {
                element: 1,
                first: 0,
                second: 1
            })
        );
        assert_eq!(
            Partition::from_blocks(3, &[vec![0, 1]]),
            Err(PartitionError::Uncovered { element: 2 })
        );
        assert_eq!(
            Partition::from_blocks(2, &[vec![0, 5]]),
            Err(PartitionError::OutOfRange { element: 5, size: 2 })
        );
        assert_eq!(
            Partition::from_blocks(1, &[vec![0], vec![]]),
            Err(PartitionError::EmptyBlock { block: 1 })
        );
    }

    #[test]
    fn canonical_block_order() {
        let p = Partition::from_blocks(4, &[vec![3, 1], vec![2, 0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert!(p.same_block(1, 3));
        assert!(!p.same_block(0, 1));
    }

    #[test]
    fn pair_closure_reports_added_pairs() {
        let (p, added) = Partition::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p.num_blocks(), 1);
        assert!(added);
        let (p, added) = Partition::from_pairs(3, &[(0, 1), (1, 0), (2, 2)]).unwrap();
        assert_eq!(p.num_blocks(), 2);
        assert!(!added);
    }

    #[test]
    fn mod_two_and_three_meet_is_discrete() {
        let m2 = Partition::from_keys(&(0..6).map(|e| e % 2).collect::<Vec<_>>());
        let m3 = Partition::from_keys(&(0..6).map(|e| e % 3).collect::<Vec<_>>());
        let m = m2.meet(&m3);
        assert!(m.is_discrete());
        assert!(m.refines(&m2) && m.refines(&m3));
        assert!(!m2.refines(&m3));
    }

    proptest! {
        #[test]
        fn meet_refines_both(a in proptest::collection::vec(0u8..3, 0..12), seed in any::<u64>()) {
            let b: Vec<u64> = a.iter().enumerate().map(|(k, _)| (seed >> (k % 60)) & 1).collect();
            let pa = Partition::from_keys(&a);
            let pb = Partition::from_keys(&b);
            let m = pa.meet(&pb);
            prop_assert!(m.refines(&pa));
            prop_assert!(m.refines(&pb));
            for x in 0..a.len() {
                for y in 0..a.len() {
                    prop_assert_eq!(m.same_block(x, y), pa.same_block(x, y) && pb.same_block(x, y));
                }
            }
        }
    }
}
