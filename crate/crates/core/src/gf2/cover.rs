use std::collections::BTreeSet;

use super::{mask, AffineMap, AffineSubspace, LinMap, Subspace, SympVec};
use crate::{Error, Result};

/// Exponent K₂ of the Marton-type covering bound.
///
/// Kept for documentation of the theoretical bounds only; at desk scale the
/// resulting thresholds are vacuous and nothing uses them at runtime.
pub const MARTON_K2: u32 = 73;

/// K₁ = 3·6⁷², companion of [`MARTON_K2`].
pub fn marton_k1() -> f64 {
    3.0 * 6f64.powi(72)
}

fn dedup(n: usize, s: &[SympVec]) -> Result<BTreeSet<u64>> {
    s.iter()
        .map(|z| {
            if z.n() != n {
                Err(Error::DimensionMismatch { expected: n, found: z.n() })
            } else {
                Ok(z.word())
            }
        })
        .collect()
}

/// |S ∩ V|·|U| / |V|, the covering guarantee for `cover_affine_map`.
pub fn cover_bound(s: &[SympVec], v: &AffineSubspace) -> Result<f64> {
    let n = v.ambient() / 2;
    let set = dedup(n, s)?;
    let hits = set.iter().filter(|&&z| v.contains(z)).count();
    let u = projection(n, v).len();
    Ok(hits as f64 * u as f64 / v.len() as f64)
}

/// Projection U of V onto the first (y) half.
fn projection(n: usize, v: &AffineSubspace) -> AffineSubspace {
    let dir = Subspace::span(n, v.direction().basis().iter().map(|&b| b >> n)).expect("fits");
    AffineSubspace::new(v.offset() >> n, dir).expect("fits")
}

fn smallest_partner(n: usize, v: &AffineSubspace, y: u64) -> u64 {
    (0..1u64 << n)
        .find(|&a| v.contains((y << n) | a))
        .expect("y lies in the projection of V")
}

/// Finds an affine map whose graph meets S in at least |S∩V|·|U|/|V| points.
///
/// First builds an affine L with (u, L(u)) ∈ V for all u in the projection U
/// (each partner chosen as the smallest valid α), extended by zero outside U.
/// The translates of G(L) are the graphs of y ↦ M y + c over all shifts c;
/// the shift meeting S most often wins, smallest c on ties. Returns the map
/// and |G(ℓ) ∩ S|.
pub fn cover_affine_map(s: &[SympVec], v: &AffineSubspace) -> Result<(AffineMap, usize)> {
    if v.ambient() % 2 != 0 {
        return Err(Error::InvalidParameter("V must live in an even-dimensional space".into()));
    }
    let n = v.ambient() / 2;
    let set = dedup(n, s)?;

    let u = projection(n, v);
    let u0 = u.offset();
    let base = smallest_partner(n, v, u0);
    let mut pairs: Vec<(u64, u64)> = u
        .direction()
        .basis()
        .iter()
        .map(|&ui| (ui, smallest_partner(n, v, u0 ^ ui) ^ base))
        .collect();
    pairs.extend(u.direction().complement_units().into_iter().map(|e| (e, 0)));
    let linear = LinMap::from_basis_images(n, &pairs)?;

    let mut counts = vec![0usize; 1 << n];
    for &z in &set {
        let (y, a) = (z >> n, z & mask(n));
        counts[(a ^ linear.apply_bits(y)) as usize] += 1;
    }
    let (shift, &count) = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("at least one shift");
    Ok((AffineMap::new(linear, shift as u64)?, count))
}

/// Additive-structure diagnostics of a finite set.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DoublingStats {
    /// Pr over (z₁, z₂) ∈ S² of z₁ + z₂ ∈ S.
    pub energy: f64,
    /// |S + S| / |S|.
    pub ratio: f64,
    pub size: usize,
}

pub fn doubling_stats(s: &[SympVec]) -> Result<DoublingStats> {
    let Some(first) = s.first() else {
        return Err(Error::InvalidParameter("doubling statistics need a nonempty set".into()));
    };
    let set = dedup(first.n(), s)?;
    let elems: Vec<u64> = set.iter().copied().collect();
    let mut hits = 0usize;
    let mut sums = BTreeSet::new();
    for &a in &elems {
        for &b in &elems {
            let c = a ^ b;
            if set.contains(&c) {
                hits += 1;
            }
            sums.insert(c);
        }
    }
    let k = elems.len() as f64;
    Ok(DoublingStats { energy: hits as f64 / (k * k), ratio: sums.len() as f64 / k, size: elems.len() })
}
