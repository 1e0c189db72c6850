use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::{bell_diff_distribution, char_function, CharTable, MAX_TABLE_QUBITS};
use crate::gf2::{format_bits, SympVec};
use crate::states::StateVector;
use crate::{Error, Result};

/// q entries below this are rounding residue and are never sampled.
const Q_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub z: SympVec,
    pub same_bit: bool,
}

impl ShotRecord {
    pub fn csv_row(&self) -> (String, String, u8) {
        let n = self.z.n();
        (format_bits(n, self.z.y.bits()), format_bits(n, self.z.alpha.bits()), self.same_bit as u8)
    }
}

/// Samples Bell difference outcomes from the exact law: z ~ q, then
/// same_bit ~ Bernoulli((1 + f(z))/2).
#[derive(Clone, Debug)]
pub struct BellSampler {
    n: usize,
    table: CharTable,
    cdf: Vec<f64>,
}

impl BellSampler {
    pub fn new(state: &StateVector) -> Result<Self> {
        let n = state.n();
        if n > MAX_TABLE_QUBITS {
            return Err(Error::TooLarge { what: "Bell sampler", n, max: MAX_TABLE_QUBITS });
        }
        state.ensure_normalized()?;
        let table = char_function(state)?;
        let q = bell_diff_distribution(&table)?;
        let mut acc = 0.0;
        let cdf: Vec<f64> = q
            .values()
            .iter()
            .map(|&p| {
                acc += if p < Q_FLOOR { 0.0 } else { p };
                acc
            })
            .collect();
        if (acc - 1.0).abs() > 1e-9 {
            return Err(Error::invariant("q sums to one", format!("total {acc}")));
        }
        Ok(BellSampler { n, table, cdf })
    }

    pub fn table(&self) -> &CharTable {
        &self.table
    }

    /// One shot from a generator.
    pub fn shot(&self, rng: &mut impl Rng) -> ShotRecord {
        let total = *self.cdf.last().expect("nonempty");
        let u = rng.random_range(0.0..total);
        let mut idx = self.cdf.partition_point(|&c| c <= u);
        idx = idx.min(self.cdf.len() - 1);
        let z = SympVec::from_index(self.n, idx);
        let p_same = (0.5 * (1.0 + self.table.values()[idx])).clamp(0.0, 1.0);
        ShotRecord { z, same_bit: rng.random_range(0.0..1.0) < p_same }
    }

    /// `shots` independent shots; shot i uses stream i of `seed`.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<ShotRecord> {
        (0..shots as u64)
            .into_par_iter()
            .map(|i| self.shot(&mut crate::rng::stream(seed, i)))
            .collect()
    }

    pub fn estimate(&self, shots: usize, seed: u64) -> Result<Estimate> {
        if shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        let same = self.sample(shots, seed).iter().filter(|s| s.same_bit).count();
        Ok(Estimate::from_counts(same, shots))
    }
}

pub fn bell_difference_sample(state: &StateVector, shots: usize, seed: u64) -> Result<Vec<ShotRecord>> {
    Ok(BellSampler::new(state)?.sample(shots, seed))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    /// R̂ = 2·(fraction of agreeing shots) − 1.
    pub r_hat: f64,
    pub shots: usize,
    /// Plug-in standard error 2·√(p(1−p)/shots).
    pub std_error: f64,
}

impl Estimate {
    fn from_counts(same: usize, shots: usize) -> Self {
        let p = same as f64 / shots as f64;
        Estimate { r_hat: 2.0 * p - 1.0, shots, std_error: 2.0 * (p * (1.0 - p) / shots as f64).sqrt() }
    }
}

/// R̂ from `shots` simulated Bell difference samples.
pub fn estimate_r(state: &StateVector, shots: usize, seed: u64) -> Result<Estimate> {
    BellSampler::new(state)?.estimate(shots, seed)
}
