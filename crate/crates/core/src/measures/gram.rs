use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{stabilizer_vectors, StabilizerState};
use crate::states::StateVector;
use crate::{Error, Result};

/// Gram matrices with λ_min below this are reported as singular.
pub const SINGULAR_TOL: f64 = 1e-9;

/// Largest number of states accepted by [`gram_lambda_min`].
pub const MAX_GRAM_SIZE: usize = 8;

/// G_ij = ⟨s_i|s_j⟩.
pub fn gram_matrix(vectors: &[&StateVector]) -> Result<DMatrix<Complex64>> {
    let k = vectors.len();
    let mut out = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = vectors[i].inner(vectors[j])?;
        }
    }
    Ok(out)
}

fn lambda_min(g: &DMatrix<Complex64>) -> f64 {
    g.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug)]
pub struct GramResult {
    pub matrix: DMatrix<Complex64>,
    pub lambda_min: f64,
    pub singular: bool,
}

pub fn gram_lambda_min(states: &[StabilizerState]) -> Result<GramResult> {
    if states.is_empty() || states.len() > MAX_GRAM_SIZE {
        return Err(Error::InvalidParameter(format!(
            "Gram matrices take 1 to {MAX_GRAM_SIZE} states, got {}",
            states.len()
        )));
    }
    let vectors: Vec<StateVector> = states.iter().map(StabilizerState::to_statevector).collect();
    let refs: Vec<&StateVector> = vectors.iter().collect();
    let matrix = gram_matrix(&refs)?;
    let lambda_min = lambda_min(&matrix);
    Ok(GramResult { matrix, lambda_min, singular: lambda_min < SINGULAR_TOL })
}

fn quantize(c: Complex64, tol: f64, phases: u32) -> Option<(u32, u32)> {
    let r = c.norm();
    if r <= tol {
        return Some((0, u32::MAX));
    }
    let m = (-2.0 * r.log2()).round();
    if m < 0.0 {
        return None;
    }
    let mag = 2f64.powf(-m / 2.0);
    (0..phases)
        .find(|&k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / phases as f64;
            (c - Complex64::from_polar(mag, angle)).norm() <= tol
        })
        .map(|k| (k, m as u32))
}

/// Writes c as i^ℓ · 2^(−m/2), returning (ℓ, m). Zero maps to (0, u32::MAX).
pub fn quantize_i_power(c: Complex64, tol: f64) -> Option<(u32, u32)> {
    quantize(c, tol, 4)
}

/// Writes c as ω^k · 2^(−m/2) with ω = e^(iπ/4), returning (k, m).
/// Zero maps to (0, u32::MAX).
pub fn quantize_omega_power(c: Complex64, tol: f64) -> Option<(u32, u32)> {
    quantize(c, tol, 8)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaRow {
    pub k: usize,
    pub n: usize,
    /// None when every evaluated subset was singular.
    pub min_lambda: Option<f64>,
    pub witness: Vec<usize>,
    pub evaluated: u64,
    pub exhaustive: bool,
}

/// Whether (k, n) fits the exhaustive budget.
pub fn exhaustive_allowed(k: usize, n: usize) -> bool {
    k == 1 || (k <= 3 && n <= 2) || (k == 2 && n <= 3)
}

struct Best {
    lambda: f64,
    witness: Vec<usize>,
    evaluated: u64,
}

impl Best {
    fn empty() -> Self {
        Best { lambda: f64::INFINITY, witness: Vec::new(), evaluated: 0 }
    }

    fn offer(&mut self, lambda: f64, idx: &[usize]) {
        self.evaluated += 1;
        if lambda >= SINGULAR_TOL && lambda < self.lambda - 1e-12 {
            self.lambda = lambda;
            self.witness = idx.to_vec();
        }
    }

    /// Merges a later block; earlier blocks win ties.
    fn merge(mut self, other: Best) -> Self {
        self.evaluated += other.evaluated;
        if other.lambda < self.lambda - 1e-12 {
            self.lambda = other.lambda;
            self.witness = other.witness;
        }
        self
    }
}

fn pairwise(vectors: &[StateVector]) -> Vec<Vec<Complex64>> {
    vectors
        .par_iter()
        .map(|a| vectors.iter().map(|b| a.inner(b).expect("same n")).collect())
        .collect()
}

fn sub_lambda(pair: &[Vec<Complex64>], idx: &[usize]) -> f64 {
    let k = idx.len();
    lambda_min(&DMatrix::from_fn(k, k, |i, j| pair[idx[i]][idx[j]]))
}

fn scan_from(pair: &[Vec<Complex64>], prefix: &mut Vec<usize>, k: usize, best: &mut Best) {
    if prefix.len() == k {
        let l = sub_lambda(pair, prefix);
        best.offer(l, prefix);
        return;
    }
    let start = prefix.last().map_or(0, |&l| l + 1);
    for i in start..pair.len() {
        prefix.push(i);
        scan_from(pair, prefix, k, best);
        prefix.pop();
    }
}

/// For each k ≤ k_max and n ≤ n_max, the smallest nonzero-within-tolerance
/// λ_min over Gram matrices of k distinct enumerated stabilizer states.
pub fn lambda_star_scan(k_max: usize, n_max: usize, mode: ScanMode) -> Result<Vec<LambdaRow>> {
    if k_max == 0 || k_max > MAX_GRAM_SIZE {
        return Err(Error::InvalidParameter(format!("k_max must lie in 1..={MAX_GRAM_SIZE}")));
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let vectors = stabilizer_vectors(n)?;
        let pair = pairwise(vectors);
        for k in 1..=k_max {
            if k > vectors.len() {
                continue;
            }
            let row = match mode {
                ScanMode::Exhaustive => {
                    if !exhaustive_allowed(k, n) {
                        return Err(Error::BudgetExceeded(format!(
                            "exhaustive scan of k = {k}, n = {n} is outside the budget; use sampled mode"
                        )));
                    }
                    let best = (0..pair.len())
                        .into_par_iter()
                        .map(|i| {
                            let mut b = Best::empty();
                            scan_from(&pair, &mut vec![i], k, &mut b);
                            b
                        })
                        .collect::<Vec<_>>()
                        .into_iter()
                        .fold(Best::empty(), Best::merge);
                    finish(k, n, best, true)
                }
                ScanMode::Sampled { trials, seed } => {
                    let salt = ((n as u64) << 32) | k as u64;
                    let best = (0..trials)
                        .into_par_iter()
                        .map(|t| {
                            let mut rng = crate::rng::stream(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15), t);
                            let mut idx = Vec::with_capacity(k);
                            while idx.len() < k {
                                let i = rng.random_range(0..pair.len());
                                if !idx.contains(&i) {
                                    idx.push(i);
                                }
                            }
                            idx.sort_unstable();
                            let mut b = Best::empty();
                            b.offer(sub_lambda(&pair, &idx), &idx);
                            b
                        })
                        .collect::<Vec<_>>()
                        .into_iter()
                        .fold(Best::empty(), Best::merge);
                    finish(k, n, best, false)
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

fn finish(k: usize, n: usize, best: Best, exhaustive: bool) -> LambdaRow {
    LambdaRow {
        k,
        n,
        min_lambda: best.lambda.is_finite().then_some(best.lambda),
        witness: best.witness,
        evaluated: best.evaluated,
        exhaustive,
    }
}
