//! Element-by-element reference implementations.
//!
//! Every function here is a loop-for-loop transcription of the Boolean
//! formulas over explicit `0`/`1` integers with no packing and no shortcuts.
//! The packed kernels in [`crate::bitvec`], [`crate::bop`] and [`crate::bcmm`]
//! are tested for bit-identity against these, and the CLI can rerun any
//! computation through them with `--oracle`.
//!
//! Nothing in this module may be optimized.

#![allow(clippy::needless_range_loop)]

use crate::bitvec::{BinaryVector, BooleanMatrix};
use crate::error::{Error, Result};

/// An unpacked binary vector, one integer per element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NaiveVector {
    pub elements: Vec<u8>,
}

/// An unpacked square matrix, `rows[i][n]`.
pub type NaiveMatrix = Vec<Vec<u8>>;

impl NaiveVector {
    /// Panics if an element is not 0 or 1.
    pub fn new(elements: Vec<u8>) -> Self {
        assert!(elements.iter().all(|&e| e <= 1), "elements must be 0 or 1");
        Self { elements }
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            elements: vec![0; p],
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn to_packed(&self) -> Result<BinaryVector> {
        BinaryVector::from_fn(self.len(), |i| self.elements[i] == 1)
    }
}

impl From<&BinaryVector> for NaiveVector {
    fn from(v: &BinaryVector) -> Self {
        Self {
            elements: v.iter().map(u8::from).collect(),
        }
    }
}

pub fn naive_matrix(m: &BooleanMatrix) -> NaiveMatrix {
    m.rows()
        .iter()
        .map(|r| NaiveVector::from(r).elements)
        .collect()
}

fn same_len(u: &NaiveVector, v: &NaiveVector) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(u.len())
}

/// `(u_1 ∧ v_1) ∨ (u_2 ∧ v_2) ∨ … ∨ (u_p ∧ v_p)`.
pub fn naive_inner_and(u: &NaiveVector, v: &NaiveVector) -> Result<u8> {
    let p = same_len(u, v)?;
    let mut acc = 0u8;
    for n in 0..p {
        acc |= u.elements[n] & v.elements[n];
    }
    Ok(acc)
}

/// Entry `(i, n)` is `b_i ∧ a_n`.
pub fn naive_outer_and(b: &NaiveVector, a: &NaiveVector) -> Result<NaiveMatrix> {
    let p = same_len(b, a)?;
    let mut m = vec![vec![0u8; p]; p];
    for i in 0..p {
        for n in 0..p {
            m[i][n] = b.elements[i] & a.elements[n];
        }
    }
    Ok(m)
}

pub fn naive_or_matrix(x: &NaiveMatrix, y: &NaiveMatrix) -> Result<NaiveMatrix> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    let mut m = x.clone();
    for i in 0..x.len() {
        for n in 0..x[i].len() {
            m[i][n] = x[i][n] | y[i][n];
        }
    }
    Ok(m)
}

/// Output element `i` is `⋁_n (m_in ∧ a_n)`.
pub fn naive_matvec_and(m: &NaiveMatrix, a: &NaiveVector) -> Result<NaiveVector> {
    if m.len() != a.len() {
        return Err(Error::Dimension {
            expected: m.len(),
            found: a.len(),
        });
    }
    let p = a.len();
    let mut out = NaiveVector::zeros(p);
    for i in 0..p {
        let mut acc = 0u8;
        for n in 0..p {
            acc |= m[i][n] & a.elements[n];
        }
        out.elements[i] = acc;
    }
    Ok(out)
}

fn elementwise(a: &NaiveVector, b: &NaiveVector, f: impl Fn(u8, u8) -> u8) -> Result<NaiveVector> {
    let p = same_len(a, b)?;
    let mut out = NaiveVector::zeros(p);
    for j in 0..p {
        out.elements[j] = f(a.elements[j], b.elements[j]);
    }
    Ok(out)
}

pub fn naive_and_not(a: &NaiveVector, mask: &NaiveVector) -> Result<NaiveVector> {
    elementwise(a, mask, |x, m| x & (1 - m))
}

pub fn naive_xor(a: &NaiveVector, b: &NaiveVector) -> Result<NaiveVector> {
    elementwise(a, b, |x, y| x ^ y)
}

pub fn naive_or(a: &NaiveVector, b: &NaiveVector) -> Result<NaiveVector> {
    elementwise(a, b, |x, y| x | y)
}

fn check_family(set: &[NaiveVector]) -> Result<usize> {
    let p = set.first().ok_or(Error::EmptySet)?.len();
    for v in set {
        if v.len() != p {
            return Err(Error::Dimension {
                expected: p,
                found: v.len(),
            });
        }
    }
    Ok(p)
}

/// `M = ⋁_k (b_k ∧ a_kᵀ)`, accumulated one entry at a time.
pub fn naive_train(keys: &[NaiveVector], values: &[NaiveVector]) -> Result<NaiveMatrix> {
    let p = check_family(keys)?;
    let pv = check_family(values)?;
    if pv != p {
        return Err(Error::Dimension {
            expected: p,
            found: pv,
        });
    }
    if keys.len() != values.len() {
        return Err(Error::Dimension {
            expected: keys.len(),
            found: values.len(),
        });
    }
    let mut m = vec![vec![0u8; p]; p];
    for k in 0..keys.len() {
        for i in 0..p {
            for n in 0..p {
                m[i][n] |= values[k].elements[i] & keys[k].elements[n];
            }
        }
    }
    Ok(m)
}

/// `b = M ∧ a`.
pub fn naive_recall(m: &NaiveMatrix, key: &NaiveVector) -> Result<NaiveVector> {
    naive_matvec_and(m, key)
}

/// Element-wise orthonormalization:
///
/// ```text
/// c_1 = a_1
/// c_{j,k} = a_{j,k} XOR ( OR_{i=1}^{k-1} (c_{j,i} AND a_{j,k}) )
/// ```
///
/// Outer loop over elements `j`, then vectors `k`, then predecessors `i`,
/// with the accumulator reset to zero for every `(j, k)`.
pub fn naive_bop(a: &[NaiveVector]) -> Result<Vec<NaiveVector>> {
    let p = check_family(a)?;
    let q = a.len();
    let mut c = vec![NaiveVector::zeros(p); q];
    c[0] = a[0].clone();
    for j in 0..p {
        for k in 1..q {
            let mut acu = 0u8;
            for i in 0..k {
                acu |= c[i].elements[j] & a[k].elements[j];
            }
            c[k].elements[j] = a[k].elements[j] ^ acu;
        }
    }
    Ok(c)
}
