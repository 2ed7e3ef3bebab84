//! Boolean orthonormalization.
//!
//! Element-wise, each output is
//!
//! ```text
//! c_1     = a_1
//! c_{j,k} = a_{j,k} XOR ( OR_{i<k} (c_{j,i} AND a_{j,k}) )
//! ```
//!
//! For a fixed element `j` the inner OR equals `a_{j,k} AND (OR_{i<k} c_{j,i})`,
//! and `x XOR (x AND m) = x AND NOT m`, so the whole vector reduces to
//!
//! ```text
//! c_k = a_k AND NOT (c_1 OR … OR c_{k-1})
//! ```
//!
//! which is what [`orthonormalize`] evaluates, one word at a time, with a
//! running union mask. The union of the first `k-1` outputs equals the union
//! of the first `k-1` inputs, so the mask can be built from either family.
//! The element-wise form lives on in [`crate::oracle::naive_bop`] and the two
//! are checked against each other in the tests.

use serde::Serialize;

use crate::bitvec::{BinaryVector, PatternSet};
use crate::error::{Error, Result};

/// Output of [`orthonormalize`]: pairwise-disjoint vectors in one-to-one
/// correspondence with the input keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthonormalBasis {
    pub basis: PatternSet,
    /// `source_index_map[k]` is the input index that produced `basis[k]`.
    /// Always the identity.
    pub source_index_map: Vec<usize>,
    /// `zero_flags[k]` is set when `basis[k]` came out all-zero because every
    /// bit of the input was already claimed by a predecessor.
    pub zero_flags: Vec<bool>,
}

impl OrthonormalBasis {
    /// Rebuilds the bookkeeping around an already-computed basis.
    pub fn from_basis(basis: PatternSet) -> Self {
        let zero_flags = basis.iter().map(BinaryVector::is_zero).collect();
        let source_index_map = (0..basis.len()).collect();
        Self {
            basis,
            source_index_map,
            zero_flags,
        }
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Number of vectors that satisfy the self-condition (are nonzero).
    pub fn nonzero_count(&self) -> usize {
        self.zero_flags.iter().filter(|z| !**z).count()
    }

    pub fn zero_indices(&self) -> Vec<usize> {
        self.zero_flags
            .iter()
            .enumerate()
            .filter_map(|(k, &z)| z.then_some(k))
            .collect()
    }
}

/// Rewrites `keys` so that every pair of outputs has disjoint support.
///
/// The first key passes through unchanged; each later key loses every bit
/// already set in an earlier output. Keys whose support is entirely covered
/// by their predecessors come out as zero vectors and are flagged, not
/// dropped, so indices keep lining up with the inputs.
pub fn orthonormalize(keys: &PatternSet) -> OrthonormalBasis {
    let p = keys.dimension();
    let mut claimed = BinaryVector::zeros(p).expect("pattern sets have p >= 1");
    let mut out = Vec::with_capacity(keys.len());
    for a in keys {
        let c = a
            .and_not(&claimed)
            .expect("members share the set dimension");
        claimed.or_in_place(&c);
        out.push(c);
    }
    let basis = PatternSet::new(out).expect("same length and dimension as the input");
    OrthonormalBasis::from_basis(basis)
}

/// OR of the first `count` patterns. `count == 0` gives the zero vector.
pub fn prefix_union(set: &PatternSet, count: usize) -> Result<BinaryVector> {
    if count > set.len() {
        return Err(Error::Index {
            index: count,
            len: set.len(),
        });
    }
    let mut acc = BinaryVector::zeros(set.dimension())?;
    for v in &set.as_slice()[..count] {
        acc.or_in_place(v);
    }
    Ok(acc)
}

/// Outcome of checking a family against the orthonormality conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrthonormalityReport {
    /// Every distinct pair has inner AND zero.
    pub is_orthogonal: bool,
    /// Orthogonal, and every vector has inner AND one with itself.
    pub is_orthonormal: bool,
    /// Pairs `(k, j)`, `k < j`, whose supports intersect.
    pub violating_pairs: Vec<(usize, usize)>,
    /// Indices of zero vectors (self inner AND is zero).
    pub zero_vectors: Vec<usize>,
}

/// Checks all `q(q-1)/2` distinct pairs and all `q` self-conditions.
pub fn verify_orthonormal(set: &PatternSet) -> OrthonormalityReport {
    let vs = set.as_slice();
    let mut violating_pairs = Vec::new();
    for n in 0..vs.len() {
        for m in n + 1..vs.len() {
            if vs[n].intersects(&vs[m]) {
                violating_pairs.push((n, m));
            }
        }
    }
    let zero_vectors: Vec<usize> = vs
        .iter()
        .enumerate()
        .filter_map(|(k, v)| (!v.intersects(v)).then_some(k))
        .collect();
    let is_orthogonal = violating_pairs.is_empty();
    OrthonormalityReport {
        is_orthogonal,
        is_orthonormal: is_orthogonal && zero_vectors.is_empty(),
        violating_pairs,
        zero_vectors,
    }
}

/// The elementwise ANDs `c_n ∧ c_m` for every `n < m`, in lexicographic pair
/// order. The family is orthogonal iff every returned vector is zero.
pub fn pairwise_ands(set: &PatternSet) -> Vec<BinaryVector> {
    let vs = set.as_slice();
    let mut out = Vec::with_capacity(vs.len() * vs.len().saturating_sub(1) / 2);
    for n in 0..vs.len() {
        for m in n + 1..vs.len() {
            out.push(vs[n].and(&vs[m]).expect("members share the set dimension"));
        }
    }
    out
}
