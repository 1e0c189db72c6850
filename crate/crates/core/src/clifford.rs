//! Weyl operators, Clifford circuits and stabilizer states.

mod stabilizer;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gf2::SympVec;
use crate::states::StateVector;
use crate::{Error, Result};

pub use stabilizer::{
    enumerate_stabilizers, stabilizer_count, stabilizer_vectors, StabilizerFile, StabilizerState, MAX_ENUM_QUBITS,
};

/// i^k for k taken mod 4.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// W_z|φ⟩ with W_(y,α) = i^(y·α) XʸZᵅ, where y·α is the integer overlap count.
pub fn apply_weyl(state: &StateVector, z: &SympVec) -> Result<StateVector> {
    if z.n() != state.n() {
        return Err(Error::DimensionMismatch { expected: state.n(), found: z.n() });
    }
    let (y, a) = (z.y.bits() as usize, z.alpha.bits() as usize);
    let pre = i_pow((y & a).count_ones());
    let g = state.g();
    let out = (0..g.len())
        .map(|x| {
            let src = x ^ y;
            let v = pre * g[src];
            if (src & a).count_ones() & 1 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    StateVector::from_g(out)
}

/// ⟨φ|W_z|φ⟩.
pub fn weyl_expectation(state: &StateVector, z: &SympVec) -> Result<Complex64> {
    state.inner(&apply_weyl(state, z)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    H(usize),
    S(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn max_qubit(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Z(q) => q,
            Gate::Cnot { control, target } => control.max(target),
        }
    }

    fn apply_in_place(&self, g: &mut [Complex64]) {
        match *self {
            Gate::H(q) => {
                let bit = 1usize << q;
                let r = std::f64::consts::FRAC_1_SQRT_2;
                for x in 0..g.len() {
                    if x & bit == 0 {
                        let (a, b) = (g[x], g[x | bit]);
                        g[x] = (a + b) * r;
                        g[x | bit] = (a - b) * r;
                    }
                }
            }
            Gate::S(q) => {
                let bit = 1usize << q;
                for (x, v) in g.iter_mut().enumerate() {
                    if x & bit != 0 {
                        *v *= Complex64::new(0.0, 1.0);
                    }
                }
            }
            Gate::Z(q) => {
                let bit = 1usize << q;
                for (x, v) in g.iter_mut().enumerate() {
                    if x & bit != 0 {
                        *v = -*v;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1usize << control, 1usize << target);
                for x in 0..g.len() {
                    if x & c != 0 && x & t == 0 {
                        g.swap(x, x | t);
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    n: usize,
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn identity(n: usize) -> Self {
        CliffordCircuit { n, gates: Vec::new() }
    }

    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::identity(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if gate.max_qubit() >= self.n {
            return Err(Error::InvalidParameter(format!("gate {gate:?} acts outside {} qubits", self.n)));
        }
        if let Gate::Cnot { control, target } = gate {
            if control == target {
                return Err(Error::InvalidParameter("CNOT control equals target".into()));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Real circuits contain no S gate.
    pub fn is_real(&self) -> bool {
        !self.gates.iter().any(|g| matches!(g, Gate::S(_)))
    }

    /// Gates are applied in list order.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: state.n() });
        }
        let mut g = state.g().to_vec();
        for gate in &self.gates {
            gate.apply_in_place(&mut g);
        }
        StateVector::from_g(g)
    }

    pub fn inverse(&self) -> CliffordCircuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in self.gates.iter().rev() {
            match g {
                Gate::S(q) => gates.extend([Gate::S(*q); 3]),
                other => gates.push(*other),
            }
        }
        CliffordCircuit { n: self.n, gates }
    }
}

/// Word length used for real-Clifford sampling.
pub fn mixing_depth(n: usize) -> usize {
    40 * n * n
}

fn random_word(n: usize, depth: usize, seed: u64, with_s: bool) -> Result<CliffordCircuit> {
    if n < 1 {
        return Err(Error::InvalidParameter("random Clifford needs n ≥ 1".into()));
    }
    let mut rng = crate::rng::stream(seed, 0);
    let kinds = if with_s { 4 } else { 3 };
    let mut gates = Vec::with_capacity(depth);
    while gates.len() < depth {
        let gate = match rng.random_range(0..kinds) {
            0 => Gate::H(rng.random_range(0..n)),
            1 => Gate::Z(rng.random_range(0..n)),
            2 if n >= 2 => {
                let control = rng.random_range(0..n);
                let mut target = rng.random_range(0..n - 1);
                if target >= control {
                    target += 1;
                }
                Gate::Cnot { control, target }
            }
            2 => continue,
            _ => Gate::S(rng.random_range(0..n)),
        };
        gates.push(gate);
    }
    Ok(CliffordCircuit { n, gates })
}

/// A random word of `depth` gates drawn uniformly from {H, Z, CNOT}.
pub fn random_real_clifford(n: usize, depth: usize, seed: u64) -> Result<CliffordCircuit> {
    random_word(n, depth, seed, false)
}

/// Like [`random_real_clifford`] but over {H, S, Z, CNOT}.
pub fn random_clifford(n: usize, depth: usize, seed: u64) -> Result<CliffordCircuit> {
    random_word(n, depth, seed, true)
}

/// Largest fourth moment E_x[g̃(x)⁴] accepted by [`balance`].
pub const BALANCE_TARGET: f64 = 3.0;

/// Searches for a real Clifford C with E_x[|g_{Cφ}(x)|⁴] ≤ 3.
///
/// The identity is tried first, then `max_tries − 1` seeded random circuits.
pub fn balance(state: &StateVector, max_tries: usize, seed: u64) -> Result<(CliffordCircuit, StateVector)> {
    if max_tries == 0 {
        return Err(Error::InvalidParameter("max_tries must be at least 1".into()));
    }
    if !state.is_real() {
        return Err(Error::InvalidState("balance expects real amplitudes".into()));
    }
    state.ensure_normalized()?;
    let n = state.n();
    let target = BALANCE_TARGET + 1e-12;
    let mut best = f64::INFINITY;
    for t in 0..max_tries {
        let c = if t == 0 {
            CliffordCircuit::identity(n)
        } else {
            random_real_clifford(n, mixing_depth(n), crate::rng::child_seed(seed, t as u64))?
        };
        let out = c.apply(state)?;
        let m = out.fourth_moment();
        if m <= target {
            return Ok((c, out));
        }
        best = best.min(m);
    }
    Err(Error::BalanceExhausted { tries: max_tries, best, target: BALANCE_TARGET })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{haar_state, t_tensor};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.g().iter().zip(b.g()).all(|(x, y)| (x - y).norm() < tol)
    }

    fn dense_pauli(n: usize, z: &SympVec) -> Vec<Vec<Complex64>> {
        let one = |_: usize| Complex64::new(1.0, 0.0);
        let dim = 1 << n;
        // Column x holds W_z|x⟩ built from single-qubit matrices.
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for x in 0..dim {
            let mut amp = one(0);
            let mut out = 0usize;
            for q in 0..n {
                let xb = (x >> q) & 1;
                let yb = (z.y.bits() as usize >> q) & 1;
                let ab = (z.alpha.bits() as usize >> q) & 1;
                if ab == 1 && xb == 1 {
                    amp = -amp;
                }
                if yb == 1 && ab == 1 {
                    amp *= Complex64::new(0.0, 1.0);
                }
                out |= (xb ^ yb) << q;
            }
            m[out][x] = amp;
        }
        m
    }

    #[test]
    fn weyl_examples() {
        let s = haar_state(2, 4).unwrap();
        assert_eq!(apply_weyl(&s, &SympVec::zero(2)).unwrap(), s);
        let zero = StateVector::basis(1, 0).unwrap();
        let flipped = apply_weyl(&zero, &SympVec::from_parts(1, 1, 0)).unwrap();
        assert!(close(&flipped, &StateVector::basis(1, 1).unwrap(), 1e-15));
        let t = t_tensor(1).unwrap();
        let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let out = apply_weyl(&t, &SympVec::from_parts(1, 1, 1)).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let expect = StateVector::from_unit_amplitudes(&[i * -w * FRAC_1_SQRT_2, i * FRAC_1_SQRT_2]).unwrap();
        assert!(close(&out, &expect, 1e-15));
        assert!((t.overlap(&out).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weyl_matches_dense_matrices() {
        for n in 1..=3 {
            let s = haar_state(n, 10 + n as u64).unwrap();
            let amps = s.unit_amplitudes();
            for z in SympVec::all(n) {
                let m = dense_pauli(n, &z);
                let want: Vec<Complex64> =
                    m.iter().map(|row| row.iter().zip(&amps).map(|(a, b)| a * b).sum()).collect();
                let got = apply_weyl(&s, &z).unwrap().unit_amplitudes();
                for (a, b) in got.iter().zip(&want) {
                    assert!((a - b).norm() < 1e-13);
                }
                // W_z² = ±1
                let twice = apply_weyl(&apply_weyl(&s, &z).unwrap(), &z).unwrap();
                let r = s.inner(&twice).unwrap();
                assert!((r.norm() - 1.0).abs() < 1e-12 && r.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn circuit_examples() {
        let plus = CliffordCircuit::new(1, vec![Gate::H(0)]).unwrap().apply(&StateVector::basis(1, 0).unwrap()).unwrap();
        assert!(close(&plus, &StateVector::uniform(1).unwrap(), 1e-15));
        let c = CliffordCircuit::new(2, vec![Gate::Cnot { control: 0, target: 1 }]).unwrap();
        let out = c.apply(&StateVector::basis(2, 0b01).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(2, 0b11).unwrap());
        let bell = CliffordCircuit::new(2, vec![Gate::H(0), Gate::Cnot { control: 0, target: 1 }])
            .unwrap()
            .apply(&StateVector::basis(2, 0).unwrap())
            .unwrap();
        let r2 = 2f64.sqrt();
        let want = StateVector::from_real_g(&[r2, 0.0, 0.0, r2]).unwrap();
        assert!(close(&bell, &want, 1e-14));
        assert!(CliffordCircuit::new(2, vec![Gate::H(2)]).is_err());
        assert!(CliffordCircuit::new(2, vec![Gate::Cnot { control: 1, target: 1 }]).is_err());
    }

    #[test]
    fn circuits_are_unitary_and_invertible() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 4);
            let c = random_clifford(n, 30, seed).unwrap();
            let s = haar_state(n, seed + 100).unwrap();
            let out = c.apply(&s).unwrap();
            assert!((out.mass() - 1.0).abs() < 1e-12);
            let back = c.inverse().apply(&out).unwrap();
            assert!(close(&back, &s, 1e-12));
        }
    }

    #[test]
    fn real_circuits_stay_real() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 4);
            let c = random_real_clifford(n, mixing_depth(n), seed).unwrap();
            assert!(c.is_real());
            assert_eq!(c, random_real_clifford(n, mixing_depth(n), seed).unwrap());
            for x0 in 0..1u64 << n {
                let out = c.apply(&StateVector::basis(n, x0).unwrap()).unwrap();
                assert!(out.is_real());
            }
        }
        assert!(random_real_clifford(0, 10, 1).is_err());
    }

    #[test]
    fn one_qubit_real_cliffords_have_dihedral_entries() {
        let allowed = [0.0, 1.0, -1.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
        for seed in 0..200 {
            let c = random_real_clifford(1, mixing_depth(1), seed).unwrap();
            for x0 in 0..2 {
                let col = c.apply(&StateVector::basis(1, x0).unwrap()).unwrap().unit_amplitudes();
                for a in col {
                    assert!(allowed.iter().any(|v| (a.re - v).abs() < 1e-12));
                }
            }
        }
    }

    #[test]
    fn balance_examples() {
        let plus = StateVector::uniform(3).unwrap();
        let (c, out) = balance(&plus, 1, 0).unwrap();
        assert!(c.is_empty());
        assert_eq!(out, plus);
        let (c, _) = balance(&StateVector::basis(1, 0).unwrap(), 1, 0).unwrap();
        assert!(c.is_empty());
        let zero4 = StateVector::basis(4, 0).unwrap();
        assert!(matches!(balance(&zero4, 1, 0), Err(Error::BalanceExhausted { .. })));
        let (c, out) = balance(&zero4, 1000, 7).unwrap();
        assert!(c.is_real() && !c.is_empty());
        assert!(out.fourth_moment() <= 3.0 + 1e-12);
        assert!(balance(&t_tensor(2).unwrap(), 10, 0).is_err());
    }
}
