//! Stabilizer complexity measures: Gowers norms, stabilizer fidelity and
//! stabilizer rank, plus the Gram-matrix tools and the relations report.

mod gram;
mod rank;
mod relations;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::char_function;
use crate::clifford::{enumerate_stabilizers, stabilizer_vectors, StabilizerState};
use crate::states::StateVector;
use crate::{Error, Result};

pub use gram::{
    gram_lambda_min, gram_matrix, lambda_star_scan, quantize_i_power, quantize_omega_power, GramResult, LambdaRow,
    ScanMode, SINGULAR_TOL,
};
pub use rank::{random_combination, stabilizer_rank, RankResult, RankValue, EXACT_RESIDUAL};
pub use relations::{relations_experiment, RelationsConfig, RelationsReport};

/// ‖g‖_{U^d}^{2^d} by direct summation over x, y₁, …, y_d.
pub fn gowers_norm_direct(state: &StateVector, d: usize) -> Result<f64> {
    let max_n = match d {
        1 => 10,
        2 => 6,
        3 => 4,
        _ => return Err(Error::InvalidParameter(format!("Gowers order d = {d} not in 1..=3"))),
    };
    let n = state.n();
    if n > max_n {
        return Err(Error::TooLarge { what: "direct Gowers norm", n, max: max_n });
    }
    let g = state.g();
    let big_n = g.len();
    let cube = 1usize << d;
    let points = big_n.pow(d as u32);
    let total: Complex64 = (0..big_n)
        .into_par_iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut ys = vec![0usize; d];
            for t in 0..points {
                let mut r = t;
                for y in ys.iter_mut() {
                    *y = r % big_n;
                    r /= big_n;
                }
                let mut prod = Complex64::new(1.0, 0.0);
                for w in 0..cube {
                    let mut pt = x;
                    for (i, y) in ys.iter().enumerate() {
                        if w >> i & 1 == 1 {
                            pt ^= y;
                        }
                    }
                    let v = g[pt];
                    prod *= if w.count_ones() & 1 == 1 { v.conj() } else { v };
                }
                acc += prod;
            }
            acc
        })
        .sum();
    let mean = total / (big_n * points) as f64;
    if mean.im.abs() > 1e-10 {
        return Err(Error::invariant("Gowers average is real", format!("imaginary part {}", mean.im)));
    }
    Ok(mean.re)
}

/// ‖φ‖_{U³}⁸ = (1/N) Σ_z f(z)².
pub fn gowers3(state: &StateVector) -> Result<f64> {
    state.ensure_normalized()?;
    Ok(char_function(state)?.gowers3())
}

#[derive(Clone, Debug, Serialize)]
pub struct Fidelity {
    pub value: f64,
    /// Position of the witness in [`enumerate_stabilizers`].
    pub index: usize,
    pub witness: StabilizerState,
}

/// max over stabilizers |⟨s|φ⟩|², by exhaustive search (n ≤ 4).
pub fn stabilizer_fidelity(state: &StateVector) -> Result<Fidelity> {
    let n = state.n();
    let vectors = stabilizer_vectors(n)?;
    let overlaps: Vec<f64> = vectors.par_iter().map(|s| s.overlap(state).expect("same n")).collect();
    let (index, value) = overlaps
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    Ok(Fidelity { value, index, witness: enumerate_stabilizers(n)?[index].clone() })
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub n: usize,
    /// ‖φ‖_{U³}⁸.
    pub gowers3: f64,
    pub fidelity: Option<f64>,
    pub fidelity_witness: Option<usize>,
    pub fidelity_witness_state: Option<StabilizerState>,
    pub rank: Option<RankValue>,
    pub rank_witness: Option<Vec<usize>>,
}

/// Computes every measure available at this n. Fidelity needs n ≤ 4 and rank
/// needs n ≤ 3; the others are left empty.
pub fn measure_report(state: &StateVector, delta: f64) -> Result<MeasureReport> {
    let n = state.n();
    let gowers3 = self::gowers3(state)?;
    let fid = if n <= crate::clifford::MAX_ENUM_QUBITS { Some(stabilizer_fidelity(state)?) } else { None };
    let rank = if n <= rank::MAX_RANK_QUBITS { Some(stabilizer_rank(state, delta)?) } else { None };
    Ok(MeasureReport {
        n,
        gowers3,
        fidelity: fid.as_ref().map(|f| f.value),
        fidelity_witness: fid.as_ref().map(|f| f.index),
        fidelity_witness_state: fid.map(|f| f.witness),
        rank: rank.as_ref().map(|r| r.rank),
        rank_witness: rank.map(|r| r.witness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{haar_state, t_tensor};

    #[test]
    fn direct_norm_examples() {
        assert!((gowers_norm_direct(&StateVector::uniform(3).unwrap(), 3).unwrap() - 1.0).abs() < 1e-12);
        assert!((gowers_norm_direct(&t_tensor(1).unwrap(), 3).unwrap() - 0.75).abs() < 1e-12);
        assert!((gowers_norm_direct(&StateVector::basis(1, 0).unwrap(), 3).unwrap() - 1.0).abs() < 1e-12);
        assert!(gowers_norm_direct(&StateVector::uniform(5).unwrap(), 3).is_err());
        assert!(gowers_norm_direct(&StateVector::uniform(1).unwrap(), 4).is_err());
    }

    #[test]
    fn low_order_norms_have_closed_forms() {
        for seed in 0..10 {
            let s = haar_state(3, seed).unwrap();
            let ghat = crate::states::walsh_hadamard(s.g()).unwrap();
            let u1 = gowers_norm_direct(&s, 1).unwrap();
            assert!((u1 - ghat[0].norm_sqr()).abs() < 1e-12);
            let u2 = gowers_norm_direct(&s, 2).unwrap();
            let four: f64 = ghat.iter().map(|a| a.norm_sqr().powi(2)).sum();
            assert!((u2 - four).abs() < 1e-12);
        }
    }

    #[test]
    fn table_and_direct_routes_agree() {
        let t = t_tensor(1).unwrap();
        assert!((gowers3(&t).unwrap() - 0.75).abs() < 1e-12);
        assert!((gowers3(&t_tensor(2).unwrap()).unwrap() - 0.5625).abs() < 1e-12);
        for seed in 0..20 {
            let s = haar_state(1 + seed as usize % 4, seed).unwrap();
            assert!((gowers3(&s).unwrap() - gowers_norm_direct(&s, 3).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn fidelity_examples() {
        let f = stabilizer_fidelity(&StateVector::basis(3, 0).unwrap()).unwrap();
        assert!((f.value - 1.0).abs() < 1e-12);
        assert_eq!(f.witness, StabilizerState::zero(3));
        let f = stabilizer_fidelity(&t_tensor(1).unwrap()).unwrap();
        let c = (std::f64::consts::PI / 8.0).cos();
        assert!((f.value - c * c).abs() < 1e-12);
        let h = haar_state(2, 8).unwrap();
        let f = stabilizer_fidelity(&h).unwrap();
        let mut best = 0.0f64;
        for s in enumerate_stabilizers(2).unwrap() {
            best = best.max(s.to_statevector().overlap(&h).unwrap());
        }
        assert_eq!(f.value, best);
        assert!(f.value > 0.0 && f.value < 1.0);
        assert!(stabilizer_fidelity(&StateVector::uniform(5).unwrap()).is_err());
    }

    #[test]
    fn report_fills_what_it_can() {
        let r = measure_report(&t_tensor(1).unwrap(), 0.0).unwrap();
        assert_eq!(r.rank, Some(RankValue::Exact(2)));
        assert!((r.gowers3 - 0.75).abs() < 1e-12);
        let r = measure_report(&haar_state(5, 1).unwrap(), 0.0).unwrap();
        assert!(r.fidelity.is_none() && r.rank.is_none());
    }
}
