//! Statistical and structural properties that span several modules.

mod common;

use rayon::prelude::*;
use stablab::charfn::exact_r;
use stablab::clifford::{enumerate_stabilizers, mixing_depth, random_clifford};
use stablab::measures::{gowers3, stabilizer_fidelity};
use stablab::rng::child_seed;
use stablab::states::{make_state, Family, FamilySpec};
use stablab::tester::BellSampler;
use stablab::witness::extract_stabilizer;

use common::mixed_corpus;

const SEED: u64 = 0x5EED_0F_7E575;

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let m = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (m(&ra), m(&rb));
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn spearman_helper() {
    assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 4.0, 9.0, 16.0]) - 1.0).abs() < 1e-12);
}

#[test]
fn extracted_overlap_decreases_along_interpolation() {
    let n = 3;
    // Real stabilizer states only. A complex one loses up to half its
    // overlap in the real-part split already at ε = 0, which flattens the
    // curve.
    let stabs: Vec<_> = enumerate_stabilizers(n).unwrap().iter().filter(|s| s.ell() == 0).cloned().collect();
    let eps: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let means: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let total: f64 = (0..20u64)
                .into_par_iter()
                .map(|s| {
                    let state = stabs[(s as usize * 53) % stabs.len()].clone();
                    let phi = make_state(&FamilySpec::new(n, Family::Interpolate { state, seed: child_seed(SEED, s), eps: e }))
                        .unwrap();
                    extract_stabilizer(&phi, s).unwrap().overlap
                })
                .sum();
            total / 20.0
        })
        .collect();
    let rho = spearman(&eps, &means);
    assert!(rho <= -0.8, "Spearman {rho}, means {means:?}");
    assert!(means[0] > means[10], "{means:?}");
}

#[test]
fn estimator_error_shrinks_as_inverse_root_shots() {
    let corpus = mixed_corpus(2..=3, 2, SEED);
    let shots = [100usize, 1_000, 10_000];
    let mut slopes = Vec::new();
    for (si, s) in corpus.iter().enumerate() {
        let exact = exact_r(s).unwrap();
        let sampler = BellSampler::new(s).unwrap();
        let errs: Vec<f64> = shots
            .iter()
            .map(|&m| {
                let total: f64 = (0..200u64)
                    .map(|r| (sampler.estimate(m, child_seed(child_seed(SEED, si as u64), r * 7 + m as u64)).unwrap().r_hat - exact).abs())
                    .sum();
                total / 200.0
            })
            .collect();
        if errs.iter().any(|&e| e == 0.0) {
            // R = 1 exactly: every run is exact and there is no rate to fit.
            assert!(errs.iter().all(|&e| e == 0.0));
            continue;
        }
        let xs: Vec<f64> = shots.iter().map(|&m| (m as f64).log10()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.log10()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        slopes.push(slope);
    }
    assert!(!slopes.is_empty());
    for s in &slopes {
        assert!((s + 0.5).abs() <= 0.1, "slopes {slopes:?}");
    }
}

#[test]
fn measures_are_clifford_invariant() {
    for i in 0..50u64 {
        let n = 1 + (i % 3) as usize;
        let phi = &mixed_corpus(n..=n, 6, child_seed(SEED, i))[(i % 6) as usize];
        let c = random_clifford(n, mixing_depth(n), child_seed(SEED ^ 1, i)).unwrap();
        let cphi = c.apply(phi).unwrap();
        let (f0, f1) = (stabilizer_fidelity(phi).unwrap().value, stabilizer_fidelity(&cphi).unwrap().value);
        let (g0, g1) = (gowers3(phi).unwrap(), gowers3(&cphi).unwrap());
        assert!((f0 - f1).abs() <= 1e-9 && (g0 - g1).abs() <= 1e-9, "state {i}: F {f0} vs {f1}, U3 {g0} vs {g1}");
    }
}

#[test]
fn gowers_norm_dominates_fourth_power_of_fidelity() {
    for (i, s) in mixed_corpus(1..=3, 34, SEED ^ 2).iter().take(100).enumerate() {
        let f = stabilizer_fidelity(s).unwrap().value;
        let g = gowers3(s).unwrap();
        assert!(g >= f.powi(4) - 1e-12, "state {i}: U3 {g} < F^4 {}", f.powi(4));
    }
}

#[test]
fn witness_overlap_never_exceeds_fidelity() {
    for (i, s) in mixed_corpus(1..=3, 34, SEED ^ 3).iter().take(100).enumerate() {
        let e = extract_stabilizer(s, i as u64).unwrap();
        assert!(e.overlap <= stabilizer_fidelity(s).unwrap().value + 1e-9);
        assert!(e.trace.final_overlap >= e.trace.overlap_floor - 1e-9);
    }
}
