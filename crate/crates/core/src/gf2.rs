//! Linear algebra over F₂.
//!
//! Vectors of up to 64 coordinates are packed into a single `u64`; bit `i` is
//! coordinate `i`. Bit strings are printed and parsed with coordinate 0 first
//! (ket order), while every ordering used for tie-breaking ("lexicographic" in
//! the docs) is the ordering of the packed integer encodings.
//!
//! Points of the symplectic space F₂²ⁿ are [`SympVec`]s. Their packed index is
//! `(y << n) | α`, which is also the index into every 4ⁿ-entry table in the
//! crate, so a [`Subspace`] of F₂²ⁿ is simply a subspace of 2n-bit words.

mod cover;
mod maps;
mod subspace;

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use cover::{cover_affine_map, cover_bound, doubling_stats, marton_k1, DoublingStats, MARTON_K2};
pub use maps::{AffineMap, LinMap};
pub use subspace::{perp, phase_sum, AffineSubspace, Subspace};

/// Largest supported dimension of a [`BitVec`].
pub const MAX_DIM: usize = 64;

#[inline]
pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
pub(crate) fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// An element of F₂ⁿ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    n: u8,
    bits: u64,
}

impl BitVec {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::TooLarge { what: "bit vector", n, max: MAX_DIM });
        }
        if bits & !mask(n) != 0 {
            return Err(Error::InvalidParameter(format!("bits {bits:#x} do not fit in {n} coordinates")));
        }
        Ok(BitVec { n: n as u8, bits })
    }

    /// Builds a vector, silently dropping bits above `n`.
    pub fn truncated(n: usize, bits: u64) -> Self {
        assert!(n <= MAX_DIM);
        BitVec { n: n as u8, bits: bits & mask(n) }
    }

    pub fn zero(n: usize) -> Self {
        Self::truncated(n, 0)
    }

    pub fn unit(n: usize, i: usize) -> Self {
        assert!(i < n, "unit vector index {i} out of range for dimension {n}");
        BitVec { n: n as u8, bits: 1 << i }
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// The standard inner product ⟨x, y⟩ = Σ xᵢyᵢ mod 2.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.n, other.n);
        parity(self.bits & other.bits)
    }

    /// All 2ⁿ vectors in increasing encoding order.
    pub fn all(n: usize) -> impl Iterator<Item = BitVec> {
        assert!(n < 64);
        (0..1u64 << n).map(move |bits| BitVec { n: n as u8, bits })
    }
}

impl Add for BitVec {
    type Output = BitVec;
    fn add(self, rhs: BitVec) -> BitVec {
        debug_assert_eq!(self.n, rhs.n);
        BitVec { n: self.n, bits: self.bits ^ rhs.bits }
    }
}

impl AddAssign for BitVec {
    fn add_assign(&mut self, rhs: BitVec) {
        *self = *self + rhs;
    }
}

/// Formats `bits` as `n` characters, coordinate 0 first.
pub fn format_bits(n: usize, bits: u64) -> String {
    (0..n).map(|i| if (bits >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parses a bit string written coordinate 0 first.
pub fn parse_bits(s: &str) -> Result<(usize, u64)> {
    let s = s.trim();
    if s.len() > MAX_DIM {
        return Err(Error::TooLarge { what: "bit string", n: s.len(), max: MAX_DIM });
    }
    let mut bits = 0u64;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => bits |= 1 << i,
            _ => return Err(Error::InvalidParameter(format!("invalid bit string {s:?}"))),
        }
    }
    Ok((s.len(), bits))
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(self.dim(), self.bits))
    }
}

impl FromStr for BitVec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (n, bits) = parse_bits(s)?;
        BitVec::new(n, bits)
    }
}

impl Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point z = (y, α) of the symplectic space F₂²ⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SympVec {
    pub y: BitVec,
    pub alpha: BitVec,
}

impl SympVec {
    pub fn new(y: BitVec, alpha: BitVec) -> Result<Self> {
        if y.dim() != alpha.dim() {
            return Err(Error::DimensionMismatch { expected: y.dim(), found: alpha.dim() });
        }
        if 2 * y.dim() > MAX_DIM {
            return Err(Error::TooLarge { what: "symplectic vector", n: y.dim(), max: MAX_DIM / 2 });
        }
        Ok(SympVec { y, alpha })
    }

    /// Builds from raw bit patterns (truncated to `n` bits each).
    pub fn from_parts(n: usize, y: u64, alpha: u64) -> Self {
        SympVec { y: BitVec::truncated(n, y), alpha: BitVec::truncated(n, alpha) }
    }

    /// Inverse of [`SympVec::index`].
    pub fn from_index(n: usize, index: usize) -> Self {
        let index = index as u64;
        Self::from_parts(n, index >> n, index & mask(n))
    }

    pub fn zero(n: usize) -> Self {
        Self::from_parts(n, 0, 0)
    }

    /// Half-dimension n.
    pub fn n(&self) -> usize {
        self.y.dim()
    }

    /// Packed index `(y << n) | α`; also the position in 4ⁿ tables.
    pub fn index(&self) -> usize {
        ((self.y.bits << self.n()) | self.alpha.bits) as usize
    }

    /// The packed 2n-bit word (same value as [`SympVec::index`]).
    pub fn word(&self) -> u64 {
        self.index() as u64
    }

    pub fn all(n: usize) -> impl Iterator<Item = SympVec> {
        (0..1usize << (2 * n)).map(move |i| SympVec::from_index(n, i))
    }
}

impl Add for SympVec {
    type Output = SympVec;
    fn add(self, rhs: SympVec) -> SympVec {
        SympVec { y: self.y + rhs.y, alpha: self.alpha + rhs.alpha }
    }
}

impl fmt::Display for SympVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.y, self.alpha)
    }
}

/// Swaps the y and α halves of a packed 2n-bit word.
#[inline]
pub(crate) fn swap_halves(n: usize, word: u64) -> u64 {
    (word >> n) | ((word & mask(n)) << n)
}

/// [z₁, z₂] = ⟨y₁, α₂⟩ + ⟨y₂, α₁⟩ on packed words.
#[inline]
pub(crate) fn symplectic_word(n: usize, z1: u64, z2: u64) -> bool {
    parity(z1 & swap_halves(n, z2))
}

/// The symplectic form [z₁, z₂] = ⟨y₁, α₂⟩ + ⟨y₂, α₁⟩.
pub fn symplectic_form(z1: &SympVec, z2: &SympVec) -> Result<bool> {
    if z1.n() != z2.n() {
        return Err(Error::DimensionMismatch { expected: z1.n(), found: z2.n() });
    }
    Ok(z1.y.dot(&z2.alpha) ^ z2.y.dot(&z1.alpha))
}
