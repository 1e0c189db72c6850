use std::fmt;

use serde::{Deserialize, Serialize};

use super::{format_bits, mask, parity, BitVec, Subspace, SympVec};
use crate::{Error, Result};

/// A linear map F₂ⁿ → F₂ⁿ; column j is the image of eⱼ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinMap {
    n: usize,
    cols: Vec<u64>,
}

impl LinMap {
    pub fn zero(n: usize) -> Self {
        LinMap { n, cols: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        LinMap { n, cols: (0..n).map(|j| 1u64 << j).collect() }
    }

    pub fn from_cols(n: usize, cols: Vec<u64>) -> Result<Self> {
        if cols.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: cols.len() });
        }
        if cols.iter().any(|c| c & !mask(n) != 0) {
            return Err(Error::InvalidParameter("column has bits outside the dimension".into()));
        }
        Ok(LinMap { n, cols })
    }

    /// Builds from rows: bit j of `rows[i]` is the entry (i, j).
    pub fn from_rows(n: usize, rows: &[u64]) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
        }
        LinMap::from_cols(n, rows.to_vec()).map(|m| m.transpose())
    }

    /// Solves for the map sending each `src` to its `img`. The sources must
    /// form a basis of F₂ⁿ.
    pub fn from_basis_images(n: usize, pairs: &[(u64, u64)]) -> Result<Self> {
        if pairs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: pairs.len() });
        }
        let mut rows: Vec<(u64, u64)> = pairs.to_vec();
        let mut cols = vec![0u64; n];
        // Gauss–Jordan on the sources, carrying images along.
        for bit in 0..n {
            let Some(r) = (bit..n).find(|&r| (rows[r].0 >> bit) & 1 == 1) else {
                return Err(Error::InvalidParameter("sources are not a basis".into()));
            };
            rows.swap(bit, r);
            let (ps, pi) = rows[bit];
            for (k, row) in rows.iter_mut().enumerate() {
                if k != bit && (row.0 >> bit) & 1 == 1 {
                    row.0 ^= ps;
                    row.1 ^= pi;
                }
            }
        }
        for (bit, &(_, img)) in rows.iter().enumerate() {
            cols[bit] = img;
        }
        LinMap::from_cols(n, cols)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> &[u64] {
        &self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        (self.cols[j] >> i) & 1 == 1
    }

    /// Rows of the matrix: bit j of row i is the entry (i, j).
    pub fn rows(&self) -> Vec<u64> {
        self.transpose().cols
    }

    #[inline]
    pub fn apply_bits(&self, x: u64) -> u64 {
        let mut out = 0;
        let mut rest = x;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            out ^= self.cols[j];
            rest &= rest - 1;
        }
        out
    }

    pub fn apply(&self, x: &BitVec) -> BitVec {
        BitVec::truncated(self.n, self.apply_bits(x.bits()))
    }

    /// ℓᵗ, characterised by ⟨x, ℓ(y)⟩ = ⟨ℓᵗ(x), y⟩.
    pub fn transpose(&self) -> LinMap {
        let mut cols = vec![0u64; self.n];
        for (j, &c) in self.cols.iter().enumerate() {
            for (i, col) in cols.iter_mut().enumerate() {
                if (c >> i) & 1 == 1 {
                    *col |= 1 << j;
                }
            }
        }
        LinMap { n: self.n, cols }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    /// The diagonal d with dᵢ = ⟨eᵢ, ℓ(eᵢ)⟩.
    pub fn diagonal(&self) -> u64 {
        (0..self.n).filter(|&i| self.entry(i, i)).fold(0, |d, i| d | (1 << i))
    }

    pub fn add(&self, other: &LinMap) -> LinMap {
        assert_eq!(self.n, other.n);
        LinMap { n: self.n, cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a ^ b).collect() }
    }

    /// self ∘ other.
    pub fn compose(&self, other: &LinMap) -> LinMap {
        LinMap { n: self.n, cols: other.cols.iter().map(|&c| self.apply_bits(c)).collect() }
    }

    /// The rank-one map x ↦ u⟨v, x⟩.
    pub fn outer(n: usize, u: u64, v: u64) -> LinMap {
        LinMap { n, cols: (0..n).map(|j| if (v >> j) & 1 == 1 { u } else { 0 }).collect() }
    }

    pub fn kernel(&self) -> Subspace {
        Subspace::span(self.n, self.rows()).expect("rows fit").orthogonal_complement()
    }

    pub fn rank(&self) -> usize {
        Subspace::span(self.n, self.cols.iter().copied()).expect("cols fit").dim()
    }

    /// Packed encoding: entry (i, j) at bit j·n + i (column-major).
    pub fn code(&self) -> u64 {
        self.cols.iter().enumerate().fold(0, |acc, (j, &c)| acc | (c << (j * self.n)))
    }

    pub fn from_code(n: usize, code: u64) -> LinMap {
        assert!(n * n <= 64);
        LinMap { n, cols: (0..n).map(|j| (code >> (j * n)) & mask(n)).collect() }
    }

    /// ⟨x, ℓx⟩ mod 2.
    pub fn bilinear(&self, x: u64, y: u64) -> bool {
        parity(x & self.apply_bits(y))
    }
}

impl fmt::Display for LinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows().iter().map(|&r| format_bits(self.n, r)).collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

/// An affine map y ↦ ℓ(y) + shift.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: LinMap,
    pub shift: u64,
}

impl AffineMap {
    pub fn new(linear: LinMap, shift: u64) -> Result<Self> {
        if shift & !mask(linear.n()) != 0 {
            return Err(Error::InvalidParameter("shift outside the dimension".into()));
        }
        Ok(AffineMap { linear, shift })
    }

    pub fn n(&self) -> usize {
        self.linear.n()
    }

    #[inline]
    pub fn apply_bits(&self, y: u64) -> u64 {
        self.linear.apply_bits(y) ^ self.shift
    }

    /// The graph G(ℓ) = {(y, ℓ(y))}, one point per y in encoding order.
    pub fn graph(&self) -> impl Iterator<Item = SympVec> + '_ {
        let n = self.n();
        (0..1u64 << n).map(move |y| SympVec::from_parts(n, y, self.apply_bits(y)))
    }

    /// Packed encoding `(linear.code() << n) | shift`; used for tie-breaking.
    pub fn code(&self) -> u64 {
        (self.linear.code() << self.n()) | self.shift
    }

    pub fn from_code(n: usize, code: u64) -> AffineMap {
        AffineMap { linear: LinMap::from_code(n, code >> n), shift: code & mask(n) }
    }
}
