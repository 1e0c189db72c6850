use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gram::{lambda_star_scan, ScanMode};
use super::rank::{random_combination, stabilizer_rank, RankValue};
use super::{gowers3, stabilizer_fidelity};
use crate::clifford::stabilizer_vectors;
use crate::measures::gram_matrix;
use crate::states::{haar_state, t_tensor, StateVector};
use crate::Result;

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationsConfig {
    /// Bloch-sphere grid resolution for the one-qubit sweep.
    pub grid: usize,
    /// Haar states per qubit count.
    pub haar: usize,
    /// Random stabilizer combinations per k ∈ {2, 3}.
    pub combos: usize,
    pub seed: u64,
}

impl Default for RelationsConfig {
    fn default() -> Self {
        RelationsConfig { grid: 8, haar: 5, combos: 5, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationRow {
    pub label: String,
    pub n: usize,
    pub chi: RankValue,
    pub one_minus_fidelity: f64,
    pub one_minus_gowers3: f64,
    /// λ_min of the witness Gram matrix divided by χ.
    pub gram_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankBound {
    pub k: usize,
    /// Largest 1 − F among corpus states with χ ≤ k.
    pub observed: Option<f64>,
    /// max over r ≤ k of 1 − λ*_r / r, when every λ*_r is known.
    pub from_lambda_star: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureProbe {
    pub k: usize,
    pub min_fidelity: Option<f64>,
    pub two_pow_minus_k: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationsReport {
    pub config: RelationsConfig,
    pub rows: Vec<RelationRow>,
    pub bounds: Vec<RankBound>,
    pub conjecture_probe: Vec<ConjectureProbe>,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

fn bloch(theta: f64, phi: f64) -> Result<StateVector> {
    StateVector::from_unit_amplitudes(&[
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
}

/// ½|0⟩ + (√3/2)|φ⊥⟩ where φ⊥ is φ with its |0⟩ component removed.
fn counterexample(phi: &StateVector) -> Result<StateVector> {
    let mut g = phi.g().to_vec();
    g[0] = Complex64::new(0.0, 0.0);
    let perp = StateVector::from_g(g)?.normalized()?;
    let zero = StateVector::basis(phi.n(), 0)?;
    StateVector::combination(&[(Complex64::new(0.5, 0.0), &zero), (Complex64::new(3f64.sqrt() / 2.0, 0.0), &perp)])
}

fn corpus(cfg: &RelationsConfig) -> Result<Vec<(String, StateVector, bool)>> {
    let mut out = Vec::new();
    let pi = std::f64::consts::PI;
    for i in 0..=cfg.grid {
        for j in 0..cfg.grid.max(1) {
            let (theta, phi) = (pi * i as f64 / cfg.grid.max(1) as f64, 2.0 * pi * j as f64 / cfg.grid.max(1) as f64);
            out.push((format!("bloch({i},{j})"), bloch(theta, phi)?, false));
        }
    }
    for n in 1..=2 {
        for (i, s) in stabilizer_vectors(n)?.iter().enumerate() {
            out.push((format!("stab(n={n},#{i})"), s.clone(), false));
        }
    }
    out.push(("T".into(), t_tensor(1)?, false));
    out.push(("T^2".into(), t_tensor(2)?, false));
    for n in 1..=2 {
        for h in 0..cfg.haar {
            let seed = crate::rng::child_seed(cfg.seed, (n * 1000 + h) as u64);
            out.push((format!("haar(n={n},#{h})"), haar_state(n, seed)?, false));
        }
    }
    for k in 2..=3 {
        for c in 0..cfg.combos {
            let seed = crate::rng::child_seed(cfg.seed, (10_000 + k * 1000 + c) as u64);
            out.push((format!("combo(k={k},#{c})"), random_combination(2, k, seed)?.0, false));
        }
    }
    for n in 1..=2 {
        out.push((format!("half0+T(n={n})"), counterexample(&t_tensor(n)?)?, true));
        let seed = crate::rng::child_seed(cfg.seed, 20_000 + n as u64);
        out.push((format!("half0+haar(n={n})"), counterexample(&haar_state(n, seed)?)?, true));
    }
    Ok(out)
}

fn check(name: &str, failures: Vec<String>) -> Check {
    Check {
        name: name.into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() { "ok".into() } else { failures.join("; ") },
    }
}

/// Computes (χ, 1 − F, 1 − ‖·‖⁸_{U³}) over a mixed corpus at n ≤ 2 and checks
/// the implications between the three measures.
pub fn relations_experiment(cfg: &RelationsConfig) -> Result<RelationsReport> {
    let states = corpus(cfg)?;
    let mut rows = Vec::with_capacity(states.len());
    let mut fidelities = Vec::with_capacity(states.len());
    let mut special = Vec::new();
    for (label, s, is_counterexample) in &states {
        let n = s.n();
        let fid = stabilizer_fidelity(s)?.value;
        let u3 = gowers3(s)?;
        let rank = stabilizer_rank(s, 0.0)?;
        let RankValue::Exact(chi) = rank.rank else { unreachable!("n ≤ 2 ranks are exact") };
        let vectors = stabilizer_vectors(n)?;
        let refs: Vec<&StateVector> = rank.witness.iter().map(|&i| &vectors[i]).collect();
        let lambda = gram_matrix(&refs)?.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(RelationRow {
            label: label.clone(),
            n,
            chi: rank.rank,
            one_minus_fidelity: 1.0 - fid,
            one_minus_gowers3: 1.0 - u3,
            gram_bound: lambda / chi as f64,
        });
        fidelities.push((fid, u3, chi));
        if *is_counterexample {
            special.push(rows.len() - 1);
        }
    }

    let scan = lambda_star_scan(3, 2, ScanMode::Exhaustive)?;
    let lambda_star = |k: usize| {
        scan.iter().filter(|r| r.k == k).filter_map(|r| r.min_lambda).fold(None, |a: Option<f64>, v| {
            Some(a.map_or(v, |a| a.min(v)))
        })
    };
    let chi_of = |r: &RelationRow| match r.chi {
        RankValue::Exact(c) => c,
        RankValue::Bounds { upper, .. } => upper,
    };

    let mut bounds = Vec::new();
    let mut probe = Vec::new();
    let mut bound_failures = Vec::new();
    for k in 1..=4 {
        let observed = rows.iter().filter(|r| chi_of(r) <= k).map(|r| r.one_minus_fidelity).fold(None, |a: Option<f64>, v| {
            Some(a.map_or(v, |a| a.max(v)))
        });
        let theory = (1..=k).map(|r| lambda_star(r).map(|l| 1.0 - l / r as f64)).try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)));
        if let (Some(o), Some(t)) = (observed, theory) {
            if o > t + TOL {
                bound_failures.push(format!("k = {k}: observed {o} exceeds {t}"));
            }
        }
        bounds.push(RankBound { k, observed, from_lambda_star: theory });
        probe.push(ConjectureProbe {
            k,
            min_fidelity: observed.map(|o| 1.0 - o),
            two_pow_minus_k: 2f64.powi(-(k as i32)),
        });
    }

    let mut checks = Vec::new();
    checks.push(check(
        "rank one iff fidelity one",
        rows.iter()
            .filter(|r| (chi_of(r) == 1) != (r.one_minus_fidelity <= TOL))
            .map(|r| r.label.clone())
            .collect(),
    ));
    checks.push(check(
        "fidelity one iff Gowers-3 one",
        rows.iter()
            .filter(|r| (r.one_minus_fidelity <= TOL) != (r.one_minus_gowers3 <= 1e-6))
            .map(|r| r.label.clone())
            .collect(),
    ));
    checks.push(check(
        "F ≥ λ_min(G)/χ",
        rows.iter()
            .filter(|r| 1.0 - r.one_minus_fidelity < r.gram_bound - TOL)
            .map(|r| r.label.clone())
            .collect(),
    ));
    checks.push(check(
        "Gowers-3 ≥ F⁴",
        rows.iter()
            .zip(&fidelities)
            .filter(|(_, (f, u, _))| *u < f.powi(4) - 1e-12)
            .map(|(r, _)| r.label.clone())
            .collect(),
    ));
    checks.push(check("1 − F ≤ max_r (1 − λ*_r / r) for χ ≤ k", bound_failures));
    checks.push(check(
        "counterexample family keeps F ≥ 1/4",
        special
            .iter()
            .filter(|&&i| 1.0 - rows[i].one_minus_fidelity < 0.25 - 1e-12)
            .map(|&i| rows[i].label.clone())
            .collect(),
    ));
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(RelationsReport { config: cfg.clone(), rows, bounds, conjecture_probe: probe, checks, all_passed })
}
