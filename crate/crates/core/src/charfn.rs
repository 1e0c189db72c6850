//! The characteristic function f(y, α) = |⟨φ|XʸZᵅ|φ⟩|² and the Bell
//! difference distribution q = f ∗ f.
//!
//! Tables over F₂²ⁿ are indexed by `(y << n) | α`. The Weyl prefactor i^(y·α)
//! is left out since only magnitudes appear.

use rayon::prelude::*;

use crate::gf2::{swap_halves, AffineMap};
use crate::states::{convolve, fwht_in_place, phase_derivative, walsh_hadamard, StateVector};
use crate::{Error, Result};

/// Largest n for which 4ⁿ tables are built.
pub const MAX_TABLE_QUBITS: usize = 6;

/// Negative values down to this are treated as rounding noise and zeroed.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CharTable {
    n: usize,
    f: Vec<f64>,
}

fn check_table(n: usize, len: usize) -> Result<()> {
    if n > MAX_TABLE_QUBITS {
        return Err(Error::TooLarge { what: "characteristic table", n, max: MAX_TABLE_QUBITS });
    }
    if len != 1 << (2 * n) {
        return Err(Error::DimensionMismatch { expected: 1 << (2 * n), found: len });
    }
    Ok(())
}

/// Zeroes tiny negatives; anything below −[`CLAMP_TOL`] is an invariant failure.
fn clamp_nonnegative(values: &mut [f64], identity: &'static str) -> Result<()> {
    for (i, v) in values.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < -CLAMP_TOL {
                return Err(Error::invariant(identity, format!("entry {i} is {v}")));
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Computes f for every (y, α) with one transform of Δ_y g per y.
pub fn char_function(state: &StateVector) -> Result<CharTable> {
    let n = state.n();
    if n > MAX_TABLE_QUBITS {
        return Err(Error::TooLarge { what: "characteristic table", n, max: MAX_TABLE_QUBITS });
    }
    let rows: Vec<Vec<f64>> = (0..1u64 << n)
        .into_par_iter()
        .map(|y| {
            let d = phase_derivative(state.g(), y).expect("y < N");
            walsh_hadamard(&d).expect("power of two").iter().map(|v| v.norm_sqr()).collect()
        })
        .collect();
    Ok(CharTable { n, f: rows.concat() })
}

impl CharTable {
    pub fn from_values(n: usize, f: Vec<f64>) -> Result<Self> {
        check_table(n, f.len())?;
        Ok(CharTable { n, f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn get(&self, y: u64, alpha: u64) -> f64 {
        self.f[((y << self.n) | alpha) as usize]
    }

    /// N = 2ⁿ.
    pub fn big_n(&self) -> f64 {
        (1u64 << self.n) as f64
    }

    /// (1/N) Σ_z f(z); equals 1 for a normalized state.
    pub fn mean_mass(&self) -> f64 {
        self.f.iter().sum::<f64>() / self.big_n()
    }

    /// (1/N) Σ_z f(z)², the eighth power of the Gowers-3 norm.
    pub fn gowers3(&self) -> f64 {
        self.f.iter().map(|v| v * v).sum::<f64>() / self.big_n()
    }

    /// (1/N) Σ_z f(z)³.
    pub fn cube_sum(&self) -> f64 {
        self.f.iter().map(|v| v * v * v).sum::<f64>() / self.big_n()
    }

    /// Σ_α f(y, α) for each y.
    pub fn row_sums(&self) -> Vec<f64> {
        self.f.chunks(1 << self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn max_row_sum(&self) -> f64 {
        self.row_sums().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Σ_y f(y, M y + c).
    pub fn graph_sum(&self, map: &AffineMap) -> Result<f64> {
        if map.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: map.n() });
        }
        Ok((0..1u64 << self.n).map(|y| self.get(y, map.apply_bits(y))).sum())
    }

    pub fn symplectic_fourier(&self) -> Result<Vec<f64>> {
        symplectic_fourier(self.n, &self.f)
    }
}

/// z ↦ (1/N) Σ_{z′} (−1)^[z, z′] t(z′) for an arbitrary 4ⁿ table.
pub fn symplectic_fourier(n: usize, t: &[f64]) -> Result<Vec<f64>> {
    check_table(n, t.len())?;
    let mut out: Vec<f64> = (0..t.len() as u64).map(|w| t[swap_halves(n, w) as usize]).collect();
    fwht_in_place(&mut out)?;
    let scale = 1.0 / (1u64 << n) as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

/// The distribution q = f ∗ f over F₂²ⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct BellDistribution {
    n: usize,
    q: Vec<f64>,
}

impl BellDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn total(&self) -> f64 {
        self.q.iter().sum()
    }
}

/// q(z) = 4⁻ⁿ Σ_w t(w) t(z + w).
pub fn bell_diff_distribution(t: &CharTable) -> Result<BellDistribution> {
    let mut q = convolve(&t.f, &t.f)?;
    clamp_nonnegative(&mut q, "q = f * f is nonnegative")?;
    Ok(BellDistribution { n: t.n, q })
}

/// Σ_z q(z) f(z) from an existing table.
pub fn r_from_table(t: &CharTable) -> Result<f64> {
    let q = bell_diff_distribution(t)?;
    Ok(q.q.iter().zip(&t.f).map(|(a, b)| a * b).sum())
}

/// Σ_z q(z) f(z) for a normalized state.
pub fn exact_r(state: &StateVector) -> Result<f64> {
    state.ensure_normalized()?;
    r_from_table(&char_function(state)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{apply_weyl, enumerate_stabilizers};
    use crate::gf2::{parity, Subspace, SympVec};
    use crate::states::{haar_state, t_tensor};
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn one_qubit_examples() {
        let f = char_function(&StateVector::basis(1, 0).unwrap()).unwrap();
        assert!(f.values().iter().zip([1.0, 1.0, 0.0, 0.0]).all(|(a, b)| close(*a, b, 1e-15)));
        let f = char_function(&StateVector::uniform(1).unwrap()).unwrap();
        assert_eq!(f.values(), &[1.0, 0.0, 1.0, 0.0]);
        let f = char_function(&t_tensor(1).unwrap()).unwrap();
        let want = [1.0, 0.0, 0.5, 0.5];
        assert!(f.values().iter().zip(want).all(|(a, b)| close(*a, b, 1e-15)));
    }

    #[test]
    fn fourier_route_matches_expectation_values() {
        for n in 1..=3 {
            let s = haar_state(n, 40 + n as u64).unwrap();
            let f = char_function(&s).unwrap();
            for z in SympVec::all(n) {
                let direct = s.inner(&apply_weyl(&s, &z).unwrap()).unwrap().norm_sqr();
                assert!(close(direct, f.values()[z.index()], 1e-10));
            }
        }
    }

    #[test]
    fn symplectic_fourier_examples() {
        let mut delta = vec![0.0; 16];
        delta[0] = 1.0;
        assert!(symplectic_fourier(2, &delta).unwrap().iter().all(|v| close(*v, 0.25, 0.0)));
        let f = char_function(&t_tensor(1).unwrap()).unwrap();
        let back = f.symplectic_fourier().unwrap();
        assert!(back.iter().zip(f.values()).all(|(a, b)| close(*a, *b, 1e-12)));
        assert!(symplectic_fourier(2, &[0.0; 8]).is_err());
    }

    #[test]
    fn symplectic_fourier_is_identity_on_tables() {
        for seed in 0..30 {
            let s = haar_state(1 + seed as usize % 5, seed).unwrap();
            let f = char_function(&s).unwrap();
            let back = f.symplectic_fourier().unwrap();
            assert!(back.iter().zip(f.values()).all(|(a, b)| close(*a, *b, 1e-12)));
        }
    }

    #[test]
    fn bell_distribution_examples() {
        let q = bell_diff_distribution(&char_function(&StateVector::basis(1, 0).unwrap()).unwrap()).unwrap();
        assert!(q.values().iter().zip([0.5, 0.5, 0.0, 0.0]).all(|(a, b)| close(*a, b, 1e-15)));
        let q = bell_diff_distribution(&char_function(&t_tensor(1).unwrap()).unwrap()).unwrap();
        let want = [3.0 / 8.0, 1.0 / 8.0, 0.25, 0.25];
        assert!(q.values().iter().zip(want).all(|(a, b)| close(*a, b, 1e-15)));
        for n in 1..=2 {
            for s in enumerate_stabilizers(n).unwrap() {
                let f = char_function(&s.to_statevector()).unwrap();
                let q = bell_diff_distribution(&f).unwrap();
                let uniform = 1.0 / (1u64 << n) as f64;
                for (qv, fv) in q.values().iter().zip(f.values()) {
                    assert!(close(*qv, if *fv > 0.5 { uniform } else { 0.0 }, 1e-12));
                }
                assert!(close(r_from_table(&f).unwrap(), 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn r_examples_and_sandwich() {
        let r = exact_r(&t_tensor(1).unwrap()).unwrap();
        assert!(close(r, 0.625, 1e-14));
        for seed in 0..10 {
            let s = haar_state(5, seed).unwrap();
            let f = char_function(&s).unwrap();
            let (r, u) = (r_from_table(&f).unwrap(), f.gowers3());
            assert!(u * u <= r + 1e-12 && r <= u + 1e-12);
            let q = bell_diff_distribution(&f).unwrap();
            assert!(close(q.total(), 1.0, 1e-10));
        }
        assert!(exact_r(&StateVector::from_real_g(&[1.0, 1.0]).unwrap().scale(2.0.into())).is_err());
    }

    #[test]
    fn parseval_and_additive_identities() {
        for seed in 0..40 {
            let n = 1 + seed as usize % 6;
            let f = char_function(&haar_state(n, seed).unwrap()).unwrap();
            assert!(close(f.mean_mass(), 1.0, 1e-10));
            if n <= 4 {
                let size = f.values().len();
                let v = f.values();
                let mut triple = 0.0;
                for z1 in 0..size {
                    for z2 in 0..size {
                        triple += v[z1] * v[z2] * v[z1 ^ z2];
                    }
                }
                let big_n = f.big_n();
                assert!(close(triple / (big_n * big_n), f.cube_sum(), 1e-9));
            }
        }
    }

    #[test]
    fn subspace_sums_dominate_shifted_sums() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for trial in 0..200 {
            let n = 1 + trial % 3;
            let f = char_function(&haar_state(n, trial as u64).unwrap()).unwrap();
            let k = rng.random_range(0..=2 * n);
            let v = Subspace::span(2 * n, (0..k).map(|_| rng.random_range(0..1u64 << (2 * n)))).unwrap();
            let shift = rng.random_range(0..1u64 << (2 * n));
            let on: f64 = v.elements().map(|z| f.values()[z as usize]).sum();
            let off: f64 = v.elements().map(|z| f.values()[(z ^ shift) as usize]).sum();
            assert!(on >= off - 1e-12);
        }
    }

    #[test]
    fn real_states_vanish_off_isotropic_points() {
        for seed in 0..20 {
            let n = 1 + seed as usize % 4;
            let s = haar_state(n, seed).unwrap().real_part().normalized().unwrap();
            let f = char_function(&s).unwrap();
            for z in SympVec::all(n) {
                if parity(z.y.bits() & z.alpha.bits()) {
                    assert_eq!(f.values()[z.index()], 0.0);
                }
            }
        }
    }

    #[test]
    fn fourth_power_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let size = 1usize << n;
            let f: Vec<f64> = (0..size).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g: Vec<f64> = (0..size).map(|_| rng.random_range(-1.0..1.0)).collect();
            let fg: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a * b).collect();
            let lhs: f64 = walsh_hadamard(&fg).unwrap().iter().map(|v| v.powi(4)).sum();
            let rhs = (0..size)
                .map(|y| {
                    let e = (0..size).map(|x| f[x] * f[x ^ y] * g[x] * g[x ^ y]).sum::<f64>() / size as f64;
                    e * e
                })
                .sum::<f64>()
                / size as f64;
            assert!(close(lhs, rhs, 1e-10));
        }
    }

    #[test]
    fn graph_sum_of_stabilizer_graph() {
        let f = char_function(&StateVector::uniform(2).unwrap()).unwrap();
        let zero = AffineMap::from_code(2, 0);
        assert!(close(f.graph_sum(&zero).unwrap(), 4.0, 1e-12));
        assert!(f.graph_sum(&AffineMap::from_code(3, 0)).is_err());
    }
}
