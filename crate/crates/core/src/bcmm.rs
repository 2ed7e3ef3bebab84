//! Boolean correlation matrix memory.
//!
//! Training ORs the outer ANDs of every `(value_k, key_k)` pair into a single
//! `p × p` matrix; recall ANDs that matrix against a probe. Expanding the
//! recall of a stored key `a_j`:
//!
//! ```text
//! M ∧ a_j = OR_k (a_k · a_j) ∧ b_k
//!         = (a_j · a_j) ∧ b_j  OR  OR_{k≠j} (a_k · a_j) ∧ b_k
//! ```
//!
//! where `·` is the inner AND. The first term is `b_j` whenever `a_j` is
//! nonzero; the second is crosstalk and vanishes when the keys are pairwise
//! disjoint. Crosstalk can only add bits, so a recall always covers the stored
//! value of a nonzero key.
//!
//! With `preprocess = true` the keys pass through [`orthonormalize`] first.
//! A lone probe cannot be orthonormalized on its own, so recall in that mode
//! matches the probe against the stored original keys and stimulates the
//! memory with the corresponding basis vector.

use serde::Serialize;

use crate::bitvec::{BinaryVector, Bit, BooleanMatrix, PatternSet};
use crate::bop::{orthonormalize, OrthonormalBasis};
use crate::error::{Error, Result};

/// Non-fatal conditions recorded at training time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TrainingWarning {
    /// These effective keys are zero, so their values cannot be recalled.
    ZeroEffectiveKeys(Vec<usize>),
    /// Every effective key is zero; the matrix is empty.
    AllKeysZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecallMode {
    /// `M ∧ probe`.
    Raw,
    /// Match the probe to a stored key, then stimulate with its basis vector.
    Preprocessed,
}

/// A trained memory. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainedMemory {
    matrix: BooleanMatrix,
    q: usize,
    /// Original keys and their basis, present iff trained with preprocessing.
    preprocessing: Option<(PatternSet, OrthonormalBasis)>,
    warnings: Vec<TrainingWarning>,
}

impl TrainedMemory {
    pub(crate) fn from_parts(
        matrix: BooleanMatrix,
        q: usize,
        preprocessing: Option<(PatternSet, OrthonormalBasis)>,
        effective_keys: Option<&PatternSet>,
    ) -> Self {
        let warnings = match effective_keys.or(preprocessing.as_ref().map(|(_, b)| &b.basis)) {
            Some(keys) => key_warnings(keys),
            None => Vec::new(),
        };
        Self {
            matrix,
            q,
            preprocessing,
            warnings,
        }
    }

    pub fn matrix(&self) -> &BooleanMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.dimension()
    }

    /// Number of stored associations.
    pub fn len(&self) -> usize {
        self.q
    }

    pub fn is_empty(&self) -> bool {
        self.q == 0
    }

    pub fn preprocessed(&self) -> bool {
        self.preprocessing.is_some()
    }

    pub fn stored_keys(&self) -> Option<&PatternSet> {
        self.preprocessing.as_ref().map(|(k, _)| k)
    }

    pub fn basis(&self) -> Option<&OrthonormalBasis> {
        self.preprocessing.as_ref().map(|(_, b)| b)
    }

    pub fn warnings(&self) -> &[TrainingWarning] {
        &self.warnings
    }
}

fn key_warnings(keys: &PatternSet) -> Vec<TrainingWarning> {
    let zero: Vec<usize> = keys
        .iter()
        .enumerate()
        .filter_map(|(k, v)| v.is_zero().then_some(k))
        .collect();
    if zero.is_empty() {
        Vec::new()
    } else if zero.len() == keys.len() {
        vec![TrainingWarning::AllKeysZero]
    } else {
        vec![TrainingWarning::ZeroEffectiveKeys(zero)]
    }
}

fn accumulate(keys: &PatternSet, values: &PatternSet) -> BooleanMatrix {
    let mut m = BooleanMatrix::zeros(keys.dimension()).expect("p >= 1");
    for (a, b) in keys.iter().zip(values) {
        m.or_outer_in_place(b, a);
    }
    m
}

/// Builds `M = OR_k (values[k] ∧ key_kᵀ)`, where `key_k` is either the raw
/// key or its orthonormalized counterpart.
pub fn train(keys: &PatternSet, values: &PatternSet, preprocess: bool) -> Result<TrainedMemory> {
    keys.check_same_shape(values)?;
    if preprocess {
        let basis = orthonormalize(keys);
        let matrix = accumulate(&basis.basis, values);
        Ok(TrainedMemory::from_parts(
            matrix,
            keys.len(),
            Some((keys.clone(), basis)),
            None,
        ))
    } else {
        let matrix = accumulate(keys, values);
        Ok(TrainedMemory::from_parts(
            matrix,
            keys.len(),
            None,
            Some(keys),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecallResult {
    pub response: BinaryVector,
    /// Stored key the probe resolved to (preprocessed mode only).
    pub matched_index: Option<usize>,
    /// The matched basis vector is zero, so the response is zero regardless
    /// of what was stored there.
    pub zero_basis: bool,
    /// Whether `response` equals the caller-supplied expected value, if any.
    pub exact: Option<bool>,
}

impl RecallResult {
    pub fn with_expected(mut self, expected: &BinaryVector) -> Self {
        self.exact = Some(self.response == *expected);
        self
    }
}

/// Recall in the mode the memory was trained for.
pub fn recall(mem: &TrainedMemory, key: &BinaryVector) -> Result<RecallResult> {
    let mode = if mem.preprocessed() {
        RecallMode::Preprocessed
    } else {
        RecallMode::Raw
    };
    recall_with(mem, key, mode)
}

/// Recall with an explicit mode. `Raw` works on any memory; `Preprocessed`
/// needs the stored keys and fails with [`Error::State`] without them.
pub fn recall_with(
    mem: &TrainedMemory,
    key: &BinaryVector,
    mode: RecallMode,
) -> Result<RecallResult> {
    let p = mem.dimension();
    if key.dimension() != p {
        return Err(Error::Dimension {
            expected: p,
            found: key.dimension(),
        });
    }
    match mode {
        RecallMode::Raw => Ok(RecallResult {
            response: mem.matrix.matvec_and(key)?,
            matched_index: None,
            zero_basis: false,
            exact: None,
        }),
        RecallMode::Preprocessed => {
            let (keys, basis) = mem.preprocessing.as_ref().ok_or_else(|| {
                Error::State("memory was trained without preprocessing; no stored keys".into())
            })?;
            let Some(k) = match_stored_key(keys, key) else {
                return Ok(RecallResult {
                    response: BinaryVector::zeros(p)?,
                    matched_index: None,
                    zero_basis: false,
                    exact: None,
                });
            };
            Ok(RecallResult {
                response: mem.matrix.matvec_and(&basis.basis[k])?,
                matched_index: Some(k),
                zero_basis: basis.zero_flags[k],
                exact: None,
            })
        }
    }
}

/// Exact match first, then nearest by Hamming distance with ties to the lowest
/// index. A zero probe that matches no stored key exactly addresses nothing.
fn match_stored_key(keys: &PatternSet, probe: &BinaryVector) -> Option<usize> {
    if let Some(k) = keys.iter().position(|s| s == probe) {
        return Some(k);
    }
    if probe.is_zero() {
        return None;
    }
    keys.iter()
        .enumerate()
        .min_by_key(|(k, s)| (s.hamming_distance(probe).expect("dimension checked"), *k))
        .map(|(k, _)| k)
}

/// Per-key coefficients `keys[k] · probe` of the recall expansion. The OR of
/// `values[k]` over the coefficient-one indices is the raw recall response.
pub fn crosstalk_decomposition(
    keys: &PatternSet,
    values: &PatternSet,
    probe: &BinaryVector,
) -> Result<Vec<(usize, Bit)>> {
    keys.check_same_shape(values)?;
    keys.iter()
        .enumerate()
        .map(|(k, a)| Ok((k, a.inner_and(probe)?)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CapacityReport {
    pub p: usize,
    pub q: usize,
    /// Nonzero basis vectors: associations that recall exactly.
    pub storable: usize,
    /// `storable <= p`.
    pub within_bound: bool,
}

/// Counts the reliably storable associations of a basis. Pairwise-disjoint
/// nonzero vectors in `p` dimensions number at most `p`.
pub fn capacity_report(basis: &OrthonormalBasis) -> CapacityReport {
    let p = basis.dimension();
    let storable = basis.nonzero_count();
    debug_assert!(
        storable <= p,
        "{storable} disjoint nonzero vectors in {p} dimensions"
    );
    CapacityReport {
        p,
        q: basis.len(),
        storable,
        within_bound: storable <= p,
    }
}
