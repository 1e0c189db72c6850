use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::stabilizer_vectors;
use crate::states::StateVector;
use crate::{Error, Result};

/// Largest n accepted by [`stabilizer_rank`]. At n = 3 only bounds may come back.
pub const MAX_RANK_QUBITS: usize = 3;

/// Residual treated as zero for exact decompositions.
pub const EXACT_RESIDUAL: f64 = 1e-9;

/// Singular values below this count as zero in least squares.
const SVD_EPS: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum RankValue {
    Exact(usize),
    Bounds { lower: usize, upper: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct RankResult {
    pub rank: RankValue,
    /// Indices into the stabilizer enumeration.
    pub witness: Vec<usize>,
    pub residual: f64,
}

pub(crate) fn unit_columns(n: usize) -> Result<Vec<DVector<Complex64>>> {
    Ok(stabilizer_vectors(n)?.iter().map(|s| DVector::from_vec(s.unit_amplitudes())).collect())
}

/// ‖φ − Ac‖ for the least-squares c, where A has the given columns.
pub(crate) fn projection_residual(phi: &DVector<Complex64>, cols: &[&DVector<Complex64>]) -> f64 {
    let a = DMatrix::from_fn(phi.len(), cols.len(), |i, j| cols[j][i]);
    let svd = a.clone().svd(true, true);
    let c = svd.solve(phi, SVD_EPS).expect("both factors were computed");
    (phi - a * c).norm()
}

/// Lexicographically first r-subset of `start..m`, after `prefix`, accepted by `hit`.
fn first_subset(
    prefix: &mut Vec<usize>,
    start: usize,
    m: usize,
    r: usize,
    hit: &(impl Fn(&[usize]) -> Option<f64> + Sync),
) -> Option<(Vec<usize>, f64)> {
    if prefix.len() == r {
        return hit(prefix).map(|res| (prefix.clone(), res));
    }
    let remaining = r - prefix.len();
    for i in start..=m - remaining {
        prefix.push(i);
        if let Some(found) = first_subset(prefix, i + 1, m, r, hit) {
            return Some(found);
        }
        prefix.pop();
    }
    None
}

fn search_size(
    phi: &DVector<Complex64>,
    cols: &[DVector<Complex64>],
    r: usize,
    tol: f64,
) -> Option<(Vec<usize>, f64)> {
    let m = cols.len();
    let hit = |idx: &[usize]| {
        let chosen: Vec<&DVector<Complex64>> = idx.iter().map(|&i| &cols[i]).collect();
        let res = projection_residual(phi, &chosen);
        (res <= tol).then_some(res)
    };
    (0..=m - r).into_par_iter().find_map_first(|i| first_subset(&mut vec![i], i + 1, m, r, &hit))
}

/// Greedy pursuit: repeatedly add the stabilizer with the largest overlap
/// with the current residual.
fn greedy_cover(phi: &DVector<Complex64>, cols: &[DVector<Complex64>], tol: f64) -> (Vec<usize>, f64) {
    let mut chosen: Vec<usize> = Vec::new();
    let mut residual_vec = phi.clone();
    let mut res = phi.norm();
    while res > tol && chosen.len() < phi.len() {
        let (best, _) = cols
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, c)| (i, c.dotc(&residual_vec).norm()))
            .fold((usize::MAX, -1.0), |b, (i, v)| if v > b.1 { (i, v) } else { b });
        chosen.push(best);
        let a = DMatrix::from_fn(phi.len(), chosen.len(), |i, j| cols[chosen[j]][i]);
        let c = a.clone().svd(true, true).solve(phi, SVD_EPS).expect("factors computed");
        residual_vec = phi - a * c;
        res = residual_vec.norm();
    }
    (chosen, res)
}

/// The smallest r such that some r stabilizer states reach residual ≤ δ
/// (≤ [`EXACT_RESIDUAL`] when δ = 0). Subsets are tried by increasing size
/// and lexicographically within a size.
///
/// For n ≤ 2 the search is complete. For n = 3 sizes 1 and 2 are searched
/// exhaustively, and otherwise a greedy decomposition gives an upper bound.
pub fn stabilizer_rank(state: &StateVector, delta: f64) -> Result<RankResult> {
    let n = state.n();
    if n > MAX_RANK_QUBITS {
        return Err(Error::TooLarge { what: "stabilizer rank", n, max: MAX_RANK_QUBITS });
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in [0, 1)")));
    }
    state.ensure_normalized()?;
    let tol = delta.max(EXACT_RESIDUAL);
    let phi = DVector::from_vec(state.unit_amplitudes());
    let cols = unit_columns(n)?;
    let exhaustive_max = if n <= 2 { 1 << n } else { 2 };
    for r in 1..=exhaustive_max {
        if let Some((witness, residual)) = search_size(&phi, &cols, r, tol) {
            return Ok(RankResult { rank: RankValue::Exact(r), witness, residual });
        }
    }
    if n <= 2 {
        return Err(Error::invariant("stabilizer states span the space", "no decomposition found"));
    }
    let (witness, residual) = greedy_cover(&phi, &cols, tol);
    let lower = exhaustive_max + 1;
    let rank = if witness.len() == lower {
        RankValue::Exact(lower)
    } else {
        RankValue::Bounds { lower, upper: witness.len() }
    };
    Ok(RankResult { rank, witness, residual })
}

/// A normalized random combination of k linearly independent stabilizer
/// states with complex Gaussian coefficients. Returns the state and the
/// enumeration indices used.
pub fn random_combination(n: usize, k: usize, seed: u64) -> Result<(StateVector, Vec<usize>)> {
    let vectors = stabilizer_vectors(n)?;
    if k == 0 || k > 1 << n {
        return Err(Error::InvalidParameter(format!("cannot combine {k} independent states at n = {n}")));
    }
    let mut rng = crate::rng::stream(seed, 0);
    loop {
        let mut idx: Vec<usize> = Vec::with_capacity(k);
        while idx.len() < k {
            let i = rng.random_range(0..vectors.len());
            if !idx.contains(&i) {
                idx.push(i);
            }
        }
        idx.sort_unstable();
        let a = DMatrix::from_fn(1 << n, k, |i, j| vectors[idx[j]].g()[i]);
        if a.singular_values().iter().any(|&s| s < 1e-8) {
            continue;
        }
        let terms: Vec<(Complex64, &StateVector)> = idx
            .iter()
            .map(|&i| (Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)), &vectors[i]))
            .collect();
        let s = StateVector::combination(&terms)?;
        if s.mass() < 1e-6 {
            continue;
        }
        return Ok((s.normalized()?, idx));
    }
}
