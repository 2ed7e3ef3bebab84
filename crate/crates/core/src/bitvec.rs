//! Packed binary vectors, square Boolean matrices and ordered pattern sets.
//!
//! Bits are stored LSB-first in little-endian-ordered `u64` words: bit `i`
//! lives in word `i / 64` at position `i % 64`. Bits at positions `>= p` in
//! the final word are always zero, so word-level comparisons, popcounts and
//! "any nonzero word" tests never see padding.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// Width of one storage word, in bits.
pub const WORD_BITS: usize = u64::BITS as usize;

#[inline]
fn words_for(dim: usize) -> usize {
    dim.div_ceil(WORD_BITS)
}

/// Mask of the live bits in the final word of a `dim`-bit vector.
#[inline]
fn tail_mask(dim: usize) -> u64 {
    match dim % WORD_BITS {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

/// A Boolean scalar, the result of an inner AND.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn is_one(self) -> bool {
        self == Bit::One
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl From<Bit> for bool {
    fn from(b: Bit) -> Self {
        b.is_one()
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_one() { "1" } else { "0" })
    }
}

/// A fixed-dimension bit pattern.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    dim: usize,
    words: Vec<u64>,
}

impl BinaryVector {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            dim,
            words: vec![0; words_for(dim)],
        })
    }

    pub fn ones(dim: usize) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        v.words.iter_mut().for_each(|w| *w = !0);
        v.clear_padding();
        Ok(v)
    }

    /// The `index`-th standard basis vector.
    pub fn unit(dim: usize, index: usize) -> Result<Self> {
        Self::from_indices(dim, [index])
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        Self::from_fn(bits.len(), |i| bits[i])
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        for i in 0..dim {
            if f(i) {
                v.set(i);
            }
        }
        Ok(v)
    }

    /// Builds a vector whose support is exactly `indices`.
    pub fn from_indices(dim: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        for i in indices {
            if i >= dim {
                return Err(Error::Index { index: i, len: dim });
            }
            v.set(i);
        }
        Ok(v)
    }

    /// Adopts raw storage words. Rejects a wrong word count or any set bit
    /// beyond `dim`.
    pub fn from_words(dim: usize, words: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if words.len() != words_for(dim) {
            return Err(Error::Format(format!(
                "{} words cannot hold a {dim}-bit vector",
                words.len()
            )));
        }
        if words[words.len() - 1] & !tail_mask(dim) != 0 {
            return Err(Error::Format("nonzero padding bits".into()));
        }
        Ok(Self { dim, words })
    }

    /// Parses a string of `'0'`/`'1'` characters, index 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        parse_bit_str(s).map_err(|m| Error::parse(1, m))
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Panics if `index >= dimension()`.
    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.dim,
            "bit index {index} out of range for {}",
            self.dim
        );
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    pub fn bit(&self, index: usize) -> Bit {
        self.get(index).into()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.dim).map(move |i| self.get(i))
    }

    /// Positions of the 1-bits in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn support_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// OR over the elementwise AND: one iff the supports intersect.
    pub fn inner_and(&self, other: &Self) -> Result<Bit> {
        self.check_dim(other)?;
        Ok(self.intersects(other).into())
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a ^ b)
    }

    /// `self ∧ ¬mask`.
    pub fn and_not(&self, mask: &Self) -> Result<Self> {
        self.zip_words(mask, |a, m| a & !m)
    }

    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        self.check_dim(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub(crate) fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::dimension(self.dim, other.dim));
        }
        Ok(())
    }

    /// Unchecked: callers guarantee equal dimensions.
    #[inline]
    pub(crate) fn intersects(&self, other: &Self) -> bool {
        debug_assert_eq!(self.dim, other.dim);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    #[inline]
    pub(crate) fn or_in_place(&mut self, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        self.check_dim(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut out = Self {
            dim: self.dim,
            words,
        };
        out.clear_padding();
        Ok(out)
    }

    #[inline]
    fn set(&mut self, index: usize) {
        self.words[index / WORD_BITS] |= 1 << (index % WORD_BITS);
    }

    fn clear_padding(&mut self) {
        let mask = tail_mask(self.dim);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }
}

pub(crate) fn parse_bit_str(s: &str) -> std::result::Result<BinaryVector, String> {
    let bits = s
        .chars()
        .enumerate()
        .map(|(col, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(format!(
                "unexpected character {other:?} at column {}",
                col + 1
            )),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if bits.is_empty() {
        return Err("empty bit string".into());
    }
    BinaryVector::from_bools(&bits).map_err(|e| e.to_string())
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector(p={}, {self})", self.dim)
    }
}

/// Square `p × p` bit matrix stored as `p` packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanMatrix {
    rows: Vec<BinaryVector>,
}

impl BooleanMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        let row = BinaryVector::zeros(dim)?;
        Ok(Self {
            rows: vec![row; dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let rows = (0..dim)
            .map(|i| BinaryVector::unit(dim, i))
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    /// Requires exactly as many rows as each row has bits.
    pub fn from_rows(rows: Vec<BinaryVector>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let n = rows.len();
        for r in &rows {
            if r.dimension() != n {
                return Err(Error::dimension(n, r.dimension()));
            }
        }
        Ok(Self { rows })
    }

    /// Outer AND `b ∧ aᵀ`: row `i` is `a` where `b_i = 1`, zero elsewhere.
    pub fn outer_and(b: &BinaryVector, a: &BinaryVector) -> Result<Self> {
        b.check_dim(a)?;
        let mut m = Self::zeros(a.dimension())?;
        m.or_outer_in_place(b, a);
        Ok(m)
    }

    /// Elementwise OR with a matrix of the same shape.
    pub fn or(&self, other: &Self) -> Result<Self> {
        if self.dimension() != other.dimension() {
            return Err(Error::dimension(self.dimension(), other.dimension()));
        }
        let mut out = self.clone();
        for (r, o) in out.rows.iter_mut().zip(&other.rows) {
            r.or_in_place(o);
        }
        Ok(out)
    }

    /// `M ∧ a`: output bit `i` is the inner AND of row `i` with `a`.
    pub fn matvec_and(&self, a: &BinaryVector) -> Result<BinaryVector> {
        if a.dimension() != self.dimension() {
            return Err(Error::dimension(self.dimension(), a.dimension()));
        }
        BinaryVector::from_fn(self.dimension(), |i| self.rows[i].intersects(a))
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &BinaryVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BinaryVector] {
        &self.rows
    }

    pub fn get(&self, i: usize, n: usize) -> bool {
        self.rows[i].get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BinaryVector::is_zero)
    }

    pub fn support_count(&self) -> usize {
        self.rows.iter().map(BinaryVector::support_count).sum()
    }

    /// `self |= b ∧ aᵀ` without materializing the outer product.
    pub(crate) fn or_outer_in_place(&mut self, b: &BinaryVector, a: &BinaryVector) {
        debug_assert_eq!(b.dimension(), self.dimension());
        debug_assert_eq!(a.dimension(), self.dimension());
        for i in b.support() {
            self.rows[i].or_in_place(a);
        }
    }
}

impl fmt::Debug for BooleanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.to_string()))
            .finish()
    }
}

/// Ordered, non-empty family of vectors sharing one dimension.
///
/// Order matters: orthonormalization is order-dependent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatternSet {
    dim: usize,
    patterns: Vec<BinaryVector>,
}

impl PatternSet {
    pub fn new(patterns: Vec<BinaryVector>) -> Result<Self> {
        let first = patterns.first().ok_or(Error::EmptySet)?;
        let dim = first.dimension();
        for p in &patterns {
            if p.dimension() != dim {
                return Err(Error::dimension(dim, p.dimension()));
            }
        }
        Ok(Self { dim, patterns })
    }

    pub fn parse_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let patterns = rows
            .iter()
            .enumerate()
            .map(|(k, r)| parse_bit_str(r.as_ref()).map_err(|m| Error::parse(k + 1, m)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(patterns)
    }

    /// The standard basis `e_0 … e_{p-1}`.
    pub fn identity(dim: usize) -> Result<Self> {
        let patterns = (0..dim)
            .map(|i| BinaryVector::unit(dim, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(patterns)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    /// Always false; a pattern set holds at least one vector.
    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&BinaryVector> {
        self.patterns.get(k)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BinaryVector> {
        self.patterns.iter()
    }

    pub fn as_slice(&self) -> &[BinaryVector] {
        &self.patterns
    }

    pub fn into_vec(self) -> Vec<BinaryVector> {
        self.patterns
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::dimension(self.dim, other.dim));
        }
        if self.len() != other.len() {
            return Err(Error::dimension(self.len(), other.len()));
        }
        Ok(())
    }
}

impl Index<usize> for PatternSet {
    type Output = BinaryVector;

    fn index(&self, k: usize) -> &BinaryVector {
        &self.patterns[k]
    }
}

impl<'a> IntoIterator for &'a PatternSet {
    type Item = &'a BinaryVector;
    type IntoIter = std::slice::Iter<'a, BinaryVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.patterns.iter()
    }
}
