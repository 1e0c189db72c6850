//! Simulated Bell difference sampling and the two decision procedures built
//! on the statistic R̂: a tolerant stabilizer-fidelity test and a low-rank
//! versus Haar distinguisher.

mod fullsim;
mod sampler;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::measures::{random_combination, stabilizer_fidelity};
use crate::rng::child_seed;
use crate::states::{haar_state, make_state, Family, FamilySpec, StateVector};
use crate::{Error, Result};

pub use fullsim::{four_copy_law, sampler_law, total_variation, MAX_FULL_SIM_QUBITS};
pub use sampler::{bell_difference_sample, estimate_r, BellSampler, Estimate, ShotRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Close,
    Far,
    LowRank,
    Haar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestDecision {
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub shots: usize,
    pub seed: u64,
}

/// τ(ε₁) = ε₁⁸/2.
pub fn default_threshold(eps1: f64) -> f64 {
    eps1.powi(8) / 2.0
}

/// Decides whether the stabilizer fidelity is at least `eps1` or at most
/// `eps2`. The verdict is `Close` iff R̂ ≥ threshold.
pub fn tolerant_test(
    state: &StateVector,
    eps1: f64,
    eps2: f64,
    shots: usize,
    seed: u64,
    threshold: Option<f64>,
) -> Result<TestDecision> {
    if !(0.0 < eps2 && eps2 < eps1 && eps1 <= 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < eps2 < eps1 <= 1, got eps1 = {eps1}, eps2 = {eps2}")));
    }
    let threshold = threshold.unwrap_or_else(|| default_threshold(eps1));
    let statistic = estimate_r(state, shots, seed)?.r_hat;
    let verdict = if statistic >= threshold { Verdict::Close } else { Verdict::Far };
    Ok(TestDecision { statistic, threshold, verdict, shots, seed })
}

/// Decides between "stabilizer rank at most k" and "Haar random" using a
/// calibrated threshold for (n, k).
pub fn rank_vs_haar_test(
    state: &StateVector,
    k: usize,
    shots: usize,
    seed: u64,
    thresholds: &Thresholds,
) -> Result<TestDecision> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let threshold = thresholds.tau(state.n(), k)?;
    let statistic = estimate_r(state, shots, seed)?.r_hat;
    let verdict = if statistic >= threshold { Verdict::LowRank } else { Verdict::Haar };
    Ok(TestDecision { statistic, threshold, verdict, shots, seed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub n: usize,
    pub k: usize,
    pub tau: f64,
    pub low_rank_median: f64,
    pub haar_median: f64,
    pub corpus_size: usize,
    pub shots: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub version: u32,
    /// Tool version that produced the file.
    #[serde(default)]
    pub generated_by: String,
    pub entries: Vec<CalibrationEntry>,
}

pub const THRESHOLDS_VERSION: u32 = 1;

const SHIPPED_THRESHOLDS: &str = include_str!("../data/thresholds.json");

impl Thresholds {
    /// The calibration table distributed with the crate.
    pub fn shipped() -> Self {
        serde_json::from_str(SHIPPED_THRESHOLDS).expect("shipped thresholds parse")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("thresholds file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn entry(&self, n: usize, k: usize) -> Result<&CalibrationEntry> {
        self.entries.iter().find(|e| e.n == n && e.k == k).ok_or(Error::MissingCalibration { n, k })
    }

    pub fn tau(&self, n: usize, k: usize) -> Result<f64> {
        Ok(self.entry(n, k)?.tau)
    }

    /// Replaces the entry for the same (n, k) or appends a new one.
    pub fn upsert(&mut self, entry: CalibrationEntry) {
        self.entries.retain(|e| (e.n, e.k) != (entry.n, entry.k));
        self.entries.push(entry);
        self.entries.sort_by_key(|e| (e.n, e.k));
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Low-rank corpus member i: a random combination of k stabilizer states.
pub fn low_rank_member(n: usize, k: usize, seed: u64, i: usize) -> Result<StateVector> {
    Ok(random_combination(n, k, child_seed(seed, 2 * i as u64))?.0)
}

/// Haar corpus member i.
pub fn haar_member(n: usize, seed: u64, i: usize) -> Result<StateVector> {
    haar_state(n, child_seed(seed, 2 * i as u64 + 1))
}

/// Estimates R̂ on `corpus_size` low-rank and `corpus_size` Haar states and
/// places τ at the midpoint of the two class medians.
pub fn calibrate(n: usize, k: usize, corpus_size: usize, shots: usize, seed: u64) -> Result<CalibrationEntry> {
    if corpus_size == 0 || shots == 0 || k == 0 {
        return Err(Error::InvalidParameter("corpus size, shots and k must be positive".into()));
    }
    let stat = |s: StateVector, i: usize, class: u64| -> Result<f64> {
        Ok(estimate_r(&s, shots, child_seed(child_seed(seed, 1_000_000 + class), i as u64))?.r_hat)
    };
    let mut low: Vec<f64> = (0..corpus_size)
        .into_par_iter()
        .map(|i| stat(low_rank_member(n, k, seed, i)?, i, 0))
        .collect::<Result<_>>()?;
    let mut haar: Vec<f64> =
        (0..corpus_size).into_par_iter().map(|i| stat(haar_member(n, seed, i)?, i, 1)).collect::<Result<_>>()?;
    let (low_rank_median, haar_median) = (median(&mut low), median(&mut haar));
    Ok(CalibrationEntry {
        n,
        k,
        tau: 0.5 * (low_rank_median + haar_median),
        low_rank_median,
        haar_median,
        corpus_size,
        shots,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoisyStabilizer {
    pub spec: FamilySpec,
    pub eps: f64,
    pub fidelity: f64,
}

pub const NOISY_CORPUS_VERSION: u32 = 1;

/// Stabilizer states mixed toward Haar noise with weight ε ~ U[0, max_eps],
/// keeping only those whose exhaustive stabilizer fidelity is at least
/// `min_fidelity`. Draw i uses stream i of `seed`, so the corpus is a fixed
/// function of its arguments.
pub fn noisy_stabilizer_corpus(
    n: usize,
    count: usize,
    max_eps: f64,
    min_fidelity: f64,
    seed: u64,
) -> Result<Vec<(NoisyStabilizer, StateVector)>> {
    use rand::Rng;
    let stabs = crate::clifford::enumerate_stabilizers(n)?;
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count {
        let mut rng = crate::rng::stream(seed, i);
        let state = stabs[rng.random_range(0..stabs.len())].clone();
        let eps = rng.random_range(0.0..=max_eps);
        let spec = FamilySpec::new(n, Family::Interpolate { state, seed: child_seed(seed, i), eps });
        let phi = make_state(&spec)?;
        let fidelity = stabilizer_fidelity(&phi)?.value;
        if fidelity >= min_fidelity {
            out.push((NoisyStabilizer { spec, eps, fidelity }, phi));
        }
        i += 1;
        if i > 1000 * count as u64 + 1000 {
            return Err(Error::BudgetExceeded(format!("only {} of {count} draws reached fidelity {min_fidelity}", out.len())));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::enumerate_stabilizers;
    use crate::states::t_tensor;

    #[test]
    fn default_threshold_values() {
        assert!((default_threshold(0.9) - 0.2152336).abs() < 1e-6);
        assert!((default_threshold(0.95) - 0.3317102).abs() < 1e-6);
    }

    #[test]
    fn tolerant_test_examples() {
        let stab = enumerate_stabilizers(3).unwrap()[400].to_statevector();
        let d = tolerant_test(&stab, 0.9, 0.5, 1000, 1, None).unwrap();
        assert_eq!((d.verdict, d.statistic), (Verdict::Close, 1.0));
        let t5 = t_tensor(5).unwrap();
        let exact = crate::charfn::exact_r(&t5).unwrap();
        assert!((exact - 0.625f64.powi(5)).abs() < 1e-10);
        let d = tolerant_test(&t5, 0.95, 0.5, 10_000, 2, None).unwrap();
        assert_eq!(d.verdict, Verdict::Far);
        let d = tolerant_test(&t5, 0.95, 0.5, 10_000, 2, Some(0.0)).unwrap();
        assert_eq!(d.verdict, Verdict::Close);
        for (e1, e2) in [(0.5, 0.6), (0.5, 0.0), (1.1, 0.5), (0.5, 0.5)] {
            assert!(matches!(tolerant_test(&stab, e1, e2, 10, 0, None), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn haar_states_at_five_qubits_are_far() {
        let wrong = (0..100)
            .filter(|&i| {
                let s = haar_state(5, 7000 + i).unwrap();
                tolerant_test(&s, 0.9, 0.5, 10_000, i, None).unwrap().verdict != Verdict::Far
            })
            .count();
        assert!(wrong <= 33, "{wrong} Haar states called close");
    }

    #[test]
    fn shipped_thresholds_cover_desk_scale() {
        let t = Thresholds::shipped();
        assert_eq!(t.version, THRESHOLDS_VERSION);
        for n in 2..=4 {
            for k in 1..=3 {
                let e = t.entry(n, k).unwrap();
                assert!(e.tau > 0.0 && e.tau <= 1.0);
                assert!(e.low_rank_median > e.haar_median);
            }
        }
        assert_eq!(t.tau(5, 2), Err(Error::MissingCalibration { n: 5, k: 2 }));
        let round = Thresholds::from_json(&t.to_json()).unwrap();
        assert_eq!(round, t);
    }

    #[test]
    fn rank_vs_haar_examples() {
        let t = Thresholds::shipped();
        let stab = enumerate_stabilizers(4).unwrap()[1234].to_statevector();
        let d = rank_vs_haar_test(&stab, 1, 2000, 3, &t).unwrap();
        assert_eq!(d.verdict, Verdict::LowRank);
        assert_eq!(d, rank_vs_haar_test(&stab, 1, 2000, 3, &t).unwrap());
        assert!(rank_vs_haar_test(&stab, 0, 10, 3, &t).is_err());
        let big = haar_state(5, 1).unwrap();
        assert!(matches!(rank_vs_haar_test(&big, 2, 10, 3, &t), Err(Error::MissingCalibration { .. })));
    }

    #[test]
    fn calibration_orders_classes() {
        let e = calibrate(2, 1, 10, 500, 4).unwrap();
        assert_eq!(e.low_rank_median, 1.0);
        assert!(e.haar_median < e.tau && e.tau < 1.0);
        assert_eq!(e, calibrate(2, 1, 10, 500, 4).unwrap());
        let mut v = [3.0, 1.0, 2.0, 10.0];
        assert_eq!(median(&mut v), 2.5);
    }

    #[test]
    fn noisy_corpus_respects_filter() {
        let c = noisy_stabilizer_corpus(2, 8, 0.4, 0.6, 9).unwrap();
        assert_eq!(c.len(), 8);
        for (meta, phi) in &c {
            assert!(meta.fidelity >= 0.6 && (0.0..=0.4).contains(&meta.eps));
            assert_eq!(make_state(&meta.spec).unwrap(), *phi);
        }
    }
}
