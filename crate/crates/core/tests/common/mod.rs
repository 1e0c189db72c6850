#![allow(dead_code)]

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use stablab::clifford::{enumerate_stabilizers, StabilizerState};
use stablab::measures::random_combination;
use stablab::rng::{child_seed, stream};
use stablab::states::{haar_state, make_state, t_tensor, Family, FamilySpec, StateVector};

/// Writes one result line straight to the process stdout so it shows up in
/// `cargo test` output without `--nocapture`.
pub fn report(id: u32, name: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "acceptance {id:>2} {verdict} {name}: {detail}");
    let _ = out.flush();
}

/// Real state with i.i.d. Gaussian amplitudes.
pub fn real_state(n: usize, seed: u64) -> StateVector {
    let mut rng = stream(seed, 0);
    let g: Vec<f64> = (0..1usize << n).map(|_| rng.sample(StandardNormal)).collect();
    StateVector::from_real_g(&g).unwrap().normalized().unwrap()
}

/// Real ±1 phase state (−1)^{c(x)} for a random cubic polynomial c.
pub fn cubic_phase_state(n: usize, seed: u64) -> StateVector {
    let mut rng = stream(seed, 0);
    let monomials: Vec<u64> = (1..1u64 << n).filter(|m| m.count_ones() <= 3 && rng.random_bool(0.5)).collect();
    let g: Vec<f64> = (0..1u64 << n)
        .map(|x| {
            let odd = monomials.iter().filter(|&&m| x & m == m).count() % 2 == 1;
            if odd { -1.0 } else { 1.0 }
        })
        .collect();
    StateVector::from_real_g(&g).unwrap()
}

pub fn random_stabilizer(n: usize, seed: u64) -> StabilizerState {
    if n <= 4 {
        let all = enumerate_stabilizers(n).unwrap();
        all[stream(seed, 0).random_range(0..all.len())].clone()
    } else {
        StabilizerState::zero(n)
    }
}

/// A deterministic mix of Haar, real Gaussian, cubic-phase, magic-tensor,
/// interpolated and low-rank states; `per_n` states for each n in `ns`.
pub fn mixed_corpus(ns: std::ops::RangeInclusive<usize>, per_n: usize, seed: u64) -> Vec<StateVector> {
    let mut out = Vec::new();
    for n in ns {
        for i in 0..per_n {
            let s = child_seed(seed, (n * 1000 + i) as u64);
            let state = match i % 6 {
                0 => haar_state(n, s).unwrap(),
                1 => real_state(n, s),
                2 => cubic_phase_state(n, s),
                3 if i == 3 => t_tensor(n).unwrap(),
                3 => haar_state(n, s).unwrap().real_part().normalized().unwrap(),
                4 => {
                    let eps = (i as f64 / per_n as f64).min(1.0);
                    let spec = FamilySpec::new(n, Family::Interpolate { state: random_stabilizer(n, s), seed: s, eps });
                    make_state(&spec).unwrap()
                }
                _ if n <= 4 => random_combination(n, 2.min(1 << n), s).unwrap().0,
                _ => haar_state(n, s ^ 1).unwrap(),
            };
            out.push(state);
        }
    }
    out
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
