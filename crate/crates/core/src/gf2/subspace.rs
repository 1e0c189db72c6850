use serde::{Deserialize, Serialize};

use super::{mask, swap_halves, symplectic_word, SympVec};
use crate::{Error, Result};

/// A linear subspace of F₂ᵐ stored as a reduced row-echelon basis.
///
/// Each basis row has a distinct pivot (its highest set bit), no other row
/// has that bit set, and rows are sorted by decreasing pivot. The form is
/// canonical, so derived equality is set equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<u64>,
}

fn pivot(row: u64) -> u32 {
    63 - row.leading_zeros()
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, (0..ambient).map(|i| 1u64 << i)).expect("unit vectors fit")
    }

    /// The span of `vectors` (which need not be independent).
    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = u64>) -> Result<Self> {
        if ambient > 64 {
            return Err(Error::TooLarge { what: "subspace", n: ambient, max: 64 });
        }
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            if v & !mask(ambient) != 0 {
                return Err(Error::DimensionMismatch { expected: ambient, found: 64 - v.leading_zeros() as usize });
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Adds `v` to the spanning set; returns false if it was already inside.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let p = pivot(r);
        for row in self.basis.iter_mut() {
            if (*row >> p) & 1 == 1 {
                *row ^= r;
            }
        }
        let at = self.basis.iter().position(|&row| pivot(row) < p).unwrap_or(self.basis.len());
        self.basis.insert(at, r);
        true
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of elements, 2^dim.
    pub fn len(&self) -> usize {
        1usize << self.dim()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    /// Pivot positions of the basis rows, in basis order.
    pub fn pivots(&self) -> Vec<u32> {
        self.basis.iter().map(|&r| pivot(r)).collect()
    }

    /// Clears every pivot bit of `v`; the result is the smallest element of
    /// the coset v + V and is zero exactly when v ∈ V.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &row in &self.basis {
            if (v >> pivot(row)) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    /// The element Σ cᵢ bᵢ for the coefficient word `c` over the basis.
    pub fn combination(&self, c: u64) -> u64 {
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| (c >> i) & 1 == 1)
            .fold(0, |acc, (_, &b)| acc ^ b)
    }

    /// All elements, ordered by coefficient word.
    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.dim()).map(move |c| self.combination(c))
    }

    /// {x : ⟨x, v⟩ = 0 for all v ∈ V} under the standard inner product.
    pub fn orthogonal_complement(&self) -> Subspace {
        let pivots = self.pivots();
        let mut out = Subspace::zero(self.ambient);
        for f in 0..self.ambient as u32 {
            if pivots.contains(&f) {
                continue;
            }
            let mut x = 1u64 << f;
            for (&row, &p) in self.basis.iter().zip(&pivots) {
                if (row >> f) & 1 == 1 {
                    x |= 1 << p;
                }
            }
            out.insert(x);
        }
        out
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        let mut s = self.clone();
        for &b in &other.basis {
            s.insert(b);
        }
        Ok(s)
    }

    /// Extends the basis to one of the whole space by adding unit vectors at
    /// the non-pivot positions, returned in increasing position order.
    pub fn complement_units(&self) -> Vec<u64> {
        let pivots = self.pivots();
        (0..self.ambient as u32).filter(|p| !pivots.contains(p)).map(|p| 1u64 << p).collect()
    }
}

/// An affine subspace offset + V with the smallest coset element as offset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineSubspace {
    offset: u64,
    direction: Subspace,
}

impl AffineSubspace {
    pub fn new(offset: u64, direction: Subspace) -> Result<Self> {
        if offset & !mask(direction.ambient()) != 0 {
            return Err(Error::InvalidParameter(format!(
                "offset {offset:#x} outside ambient dimension {}",
                direction.ambient()
            )));
        }
        Ok(AffineSubspace { offset: direction.reduce(offset), direction })
    }

    pub fn linear(direction: Subspace) -> Self {
        AffineSubspace { offset: 0, direction }
    }

    pub fn point(ambient: usize, p: u64) -> Result<Self> {
        Self::new(p, Subspace::zero(ambient))
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn direction(&self) -> &Subspace {
        &self.direction
    }

    pub fn ambient(&self) -> usize {
        self.direction.ambient()
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn len(&self) -> usize {
        self.direction.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: u64) -> bool {
        self.direction.contains(v ^ self.offset)
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        self.direction.elements().map(move |v| v ^ self.offset)
    }
}

/// The symplectic complement S⊥ = {z : [z, s] = 0 for all s ∈ S} in F₂²ⁿ.
pub fn perp(s: &Subspace) -> Result<Subspace> {
    if s.ambient() % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "symplectic complement needs an even ambient dimension, got {}",
            s.ambient()
        )));
    }
    let n = s.ambient() / 2;
    // [z, s] = ⟨z, swap(s)⟩, so S⊥ is the standard complement of swap(S).
    let swapped = Subspace::span(s.ambient(), s.basis().iter().map(|&b| swap_halves(n, b)))?;
    Ok(swapped.orthogonal_complement())
}

/// Σ_{z ∈ S} (−1)^[z, z′], evaluated term by term.
pub fn phase_sum(s: &Subspace, zp: &SympVec) -> Result<i64> {
    let n = zp.n();
    if s.ambient() != 2 * n {
        return Err(Error::DimensionMismatch { expected: s.ambient(), found: 2 * n });
    }
    let w = zp.word();
    Ok(s.elements().map(|z| if symplectic_word(n, z, w) { -1 } else { 1 }).sum())
}
