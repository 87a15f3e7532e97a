//! Append-only binary commitment accumulator with membership proofs.
//!
//! Internal nodes are hash_2 of children; absent leaves are the zero
//! sentinel, with empty-subtree hashes precomputed per level. The registry
//! accepts proofs against the current root only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldElement;
use crate::hash::hash2;

pub const DEFAULT_DEPTH: usize = 20;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum MerkleError {
    #[error("tree is at capacity ({0} leaves)")]
    CapacityExceeded(u64),
    #[error("no leaf at index {0}")]
    NoSuchLeaf(u64),
    #[error("depth must be in 1..=40, got {0}")]
    BadDepth(usize),
}

/// Membership proof: leaf index plus one sibling per level, leaf first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerklePath {
    pub leaf_index: u64,
    pub siblings: Vec<FieldElement>,
}

/// Incremental append-only Merkle tree of fixed depth.
///
/// Inserting invalidates previously issued paths for other leaves with
/// respect to the *new* root; callers re-derive paths after appends.
#[derive(Debug, Clone)]
pub struct MerkleTree {
    depth: usize,
    /// levels[0] = leaves, levels[depth] = [root]; only occupied prefixes
    /// are stored.
    levels: Vec<Vec<FieldElement>>,
    /// Empty-subtree hash per level, derived from the zero sentinel.
    empty: Vec<FieldElement>,
}

impl MerkleTree {
    pub fn new(depth: usize) -> Result<Self, MerkleError> {
        if depth == 0 || depth > 40 {
            return Err(MerkleError::BadDepth(depth));
        }
        let mut empty = Vec::with_capacity(depth + 1);
        empty.push(FieldElement::ZERO);
        for level in 0..depth {
            let e = empty[level];
            empty.push(hash2(e, e));
        }
        Ok(MerkleTree {
            depth,
            levels: vec![Vec::new(); depth + 1],
            empty,
        })
    }

    pub fn with_default_depth() -> Self {
        Self::new(DEFAULT_DEPTH).expect("default depth is valid")
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaf_count(&self) -> u64 {
        self.levels[0].len() as u64
    }

    pub fn capacity(&self) -> u64 {
        1u64 << self.depth
    }

    pub fn leaves(&self) -> &[FieldElement] {
        &self.levels[0]
    }

    fn node(&self, level: usize, index: u64) -> FieldElement {
        self.levels[level]
            .get(index as usize)
            .copied()
            .unwrap_or(self.empty[level])
    }

    pub fn root(&self) -> FieldElement {
        self.node(self.depth, 0)
    }

    /// Append a leaf, updating the path to the root.
    pub fn insert(&mut self, leaf: FieldElement) -> Result<u64, MerkleError> {
        let index = self.leaf_count();
        if index >= self.capacity() {
            return Err(MerkleError::CapacityExceeded(self.capacity()));
        }
        self.levels[0].push(leaf);
        let mut idx = index;
        for level in 0..self.depth {
            let parent = idx / 2;
            let h = hash2(self.node(level, parent * 2), self.node(level, parent * 2 + 1));
            let row = &mut self.levels[level + 1];
            if (parent as usize) < row.len() {
                row[parent as usize] = h;
            } else {
                row.push(h);
            }
            idx = parent;
        }
        Ok(index)
    }

    pub fn prove_membership(&self, leaf_index: u64) -> Result<MerklePath, MerkleError> {
        if leaf_index >= self.leaf_count() {
            return Err(MerkleError::NoSuchLeaf(leaf_index));
        }
        let mut siblings = Vec::with_capacity(self.depth);
        let mut idx = leaf_index;
        for level in 0..self.depth {
            siblings.push(self.node(level, idx ^ 1));
            idx /= 2;
        }
        Ok(MerklePath {
            leaf_index,
            siblings,
        })
    }
}

/// Fold the leaf with the siblings per index bits and compare to the root.
pub fn verify_path(root: FieldElement, leaf: FieldElement, path: &MerklePath) -> bool {
    let mut acc = leaf;
    let mut idx = path.leaf_index;
    for sibling in &path.siblings {
        acc = if idx & 1 == 0 {
            hash2(acc, *sibling)
        } else {
            hash2(*sibling, acc)
        };
        idx >>= 1;
    }
    acc == root
}
