//! Brute-force simulation of Bell difference sampling on explicit copies of
//! the state. Used only to cross-check the table-driven sampler at n ≤ 2.

use num_complex::Complex64;

use crate::charfn::{bell_diff_distribution, char_function};
use crate::clifford::apply_weyl;
use crate::gf2::SympVec;
use crate::states::StateVector;
use crate::{Error, Result};

pub const MAX_FULL_SIM_QUBITS: usize = 2;

/// Exact law of (z, same_bit), indexed `2·z.index() + same_bit`, obtained by
/// projecting four copies of the state onto every pair of Bell basis vectors
/// |W_z₁⟩⊗|W_z₂⟩ and then measuring two more copies in the eigenbasis of
/// W_(z₁+z₂).
pub fn four_copy_law(state: &StateVector) -> Result<Vec<f64>> {
    let n = state.n();
    if n > MAX_FULL_SIM_QUBITS {
        return Err(Error::TooLarge { what: "four-copy simulator", n, max: MAX_FULL_SIM_QUBITS });
    }
    state.ensure_normalized()?;
    let dim = 1usize << n;
    let psi = state.unit_amplitudes();

    // ψ^⊗4 with copy c occupying bits [c·n, (c+1)·n).
    let idx4 = |x: [usize; 4]| x[0] | (x[1] << n) | (x[2] << (2 * n)) | (x[3] << (3 * n));
    let mut full = vec![Complex64::new(0.0, 0.0); dim.pow(4)];
    for (i, amp) in full.iter_mut().enumerate() {
        let m = dim - 1;
        *amp = psi[i & m] * psi[(i >> n) & m] * psi[(i >> (2 * n)) & m] * psi[(i >> (3 * n)) & m];
    }

    // Bell vector |W_z⟩ = (1/√N) Σ_x W_z|x⟩⊗|x⟩ as a list of (index pair, amplitude).
    let bell = |z: SympVec| -> Vec<((usize, usize), Complex64)> {
        let basis: Vec<StateVector> = (0..dim as u64)
            .map(|x| StateVector::from_unit_amplitudes(&unit(dim, x as usize)).expect("basis vector"))
            .collect();
        let mut out = Vec::with_capacity(dim);
        for (x, b) in basis.iter().enumerate() {
            let w = apply_weyl(b, &z).expect("matching dimension").unit_amplitudes();
            for (x1, &a) in w.iter().enumerate() {
                if a.norm() > 0.0 {
                    out.push(((x1, x), a / (dim as f64).sqrt()));
                }
            }
        }
        out
    };
    let bells: Vec<_> = SympVec::all(n).map(bell).collect();

    let four_n = 1usize << (2 * n);
    let mut pz = vec![0.0; four_n];
    for (i1, b1) in bells.iter().enumerate() {
        for (i2, b2) in bells.iter().enumerate() {
            let mut amp = Complex64::new(0.0, 0.0);
            for &((a, b), c1) in b1 {
                for &((c, d), c2) in b2 {
                    amp += (c1 * c2).conj() * full[idx4([a, b, c, d])];
                }
            }
            pz[i1 ^ i2] += amp.norm_sqr();
        }
    }

    let mut law = vec![0.0; 2 * four_n];
    for (zi, &p) in pz.iter().enumerate() {
        let z = SympVec::from_index(n, zi);
        let w = apply_weyl(state, &z)?;
        // p± = ‖½(1 ± W_z)φ‖²
        let proj = |sign: f64| -> f64 {
            psi.iter()
                .zip(w.unit_amplitudes())
                .map(|(&a, b)| (0.5 * (a + b * sign)).norm_sqr())
                .sum()
        };
        let (plus, minus) = (proj(1.0), proj(-1.0));
        let same = plus * plus + minus * minus;
        law[2 * zi] = p * (1.0 - same);
        law[2 * zi + 1] = p * same;
    }
    Ok(law)
}

fn unit(dim: usize, x: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[x] = Complex64::new(1.0, 0.0);
    v
}

/// The law sampled by [`super::BellSampler`], in the layout of [`four_copy_law`].
pub fn sampler_law(state: &StateVector) -> Result<Vec<f64>> {
    state.ensure_normalized()?;
    let t = char_function(state)?;
    let q = bell_diff_distribution(&t)?;
    let mut law = vec![0.0; 2 * q.values().len()];
    for (zi, (&p, &f)) in q.values().iter().zip(t.values()).enumerate() {
        let same = (0.5 * (1.0 + f)).clamp(0.0, 1.0);
        law[2 * zi] = p * (1.0 - same);
        law[2 * zi + 1] = p * same;
    }
    Ok(law)
}

/// ½ Σ |p − q|.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
