//! Boolean correlation matrix memory over bit-packed binary vectors.
//!
//! Keys and values are binary vectors of a shared dimension `p`. Training
//! ORs together the outer ANDs `b_k ∧ a_kᵀ` into a `p × p` bit matrix and
//! recall ANDs that matrix against a probe, reducing each row with OR.
//! Recall is exact when the keys are pairwise disjoint and nonzero, so the
//! [`bop`] module rewrites an arbitrary key set into such a basis by clearing
//! from each key every bit already claimed by its predecessors.
//!
//! Indices throughout the crate are zero-based.
//!
//! ```
//! use bcmm_core::{train, recall, BinaryVector, PatternSet};
//!
//! let keys = PatternSet::parse_rows(&["110", "101"]).unwrap();
//! let values = PatternSet::parse_rows(&["010", "001"]).unwrap();
//! let mem = train(&keys, &values, true).unwrap();
//!
//! let hit = recall(&mem, &BinaryVector::parse("110").unwrap()).unwrap();
//! assert_eq!(hit.response.to_string(), "010");
//! assert_eq!(hit.matched_index, Some(0));
//! ```

pub mod bcmm;
pub mod bitvec;
pub mod bop;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod patio;
pub mod rng;

pub use bcmm::{
    capacity_report, crosstalk_decomposition, recall, recall_with, train, CapacityReport,
    RecallMode, RecallResult, TrainedMemory, TrainingWarning,
};
pub use bitvec::{BinaryVector, Bit, BooleanMatrix, PatternSet, WORD_BITS};
pub use bop::{
    orthonormalize, pairwise_ands, prefix_union, verify_orthonormal, OrthonormalBasis,
    OrthonormalityReport,
};
pub use error::{Error, Result};
pub use experiment::{
    ExperimentConfig, ExperimentKind, ExperimentReport, ExperimentSummary, ReportFormat,
    TrialRecord,
};
pub use rng::SplitMix64;
