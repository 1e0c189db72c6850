use std::collections::HashSet;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::i_pow;
use crate::gf2::{format_bits, mask, parity, parse_bits, AffineSubspace, Subspace};
use crate::states::StateVector;
use crate::{Error, Result};

/// Largest n accepted by [`enumerate_stabilizers`].
pub const MAX_ENUM_QUBITS: usize = 4;

/// A stabilizer state |A|^(-1/2) Σ_{x∈A} i^{ℓ(x)} (−1)^{Q(x)} |x⟩.
///
/// `ell` is the coefficient vector of ℓ. `q_upper[i]` holds the coefficients
/// Q_ij for j ≥ i, so Q(x) = Σ_i x_i Σ_{j≥i} Q_ij x_j; the diagonal plays the
/// role of the linear part of Q since x_i² = x_i.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StabilizerFile", into = "StabilizerFile")]
pub struct StabilizerState {
    support: AffineSubspace,
    ell: u64,
    q_upper: Vec<u64>,
}

impl StabilizerState {
    pub fn new(support: AffineSubspace, ell: u64, q_upper: Vec<u64>) -> Result<Self> {
        let n = support.ambient();
        if n == 0 || n > crate::states::MAX_QUBITS {
            return Err(Error::TooLarge { what: "stabilizer state", n, max: crate::states::MAX_QUBITS });
        }
        if ell & !mask(n) != 0 {
            return Err(Error::InvalidParameter("ell has bits outside n".into()));
        }
        if q_upper.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: q_upper.len() });
        }
        for (i, row) in q_upper.iter().enumerate() {
            if row & !(mask(n) & !mask(i)) != 0 {
                return Err(Error::InvalidParameter(format!("Q row {i} is not upper triangular")));
            }
        }
        Ok(StabilizerState { support, ell, q_upper })
    }

    /// |0ⁿ⟩.
    pub fn zero(n: usize) -> Self {
        let support = AffineSubspace::point(n, 0).expect("n fits");
        StabilizerState { support, ell: 0, q_upper: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.support.ambient()
    }

    pub fn support(&self) -> &AffineSubspace {
        &self.support
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn q_upper(&self) -> &[u64] {
        &self.q_upper
    }

    pub fn q_value(&self, x: u64) -> bool {
        self.q_upper
            .iter()
            .enumerate()
            .fold(false, |acc, (i, row)| acc ^ ((x >> i) & 1 == 1 && parity(row & x)))
    }

    /// The phase exponent k with amplitude ∝ i^k at x ∈ A.
    pub fn phase_exponent(&self, x: u64) -> u32 {
        parity(self.ell & x) as u32 + 2 * self.q_value(x) as u32
    }

    pub fn to_statevector(&self) -> StateVector {
        let n = self.n();
        let mag = ((1usize << n) as f64 / self.support.len() as f64).sqrt();
        let mut g = vec![Complex64::new(0.0, 0.0); 1 << n];
        for x in self.support.elements() {
            g[x as usize] = i_pow(self.phase_exponent(x)) * mag;
        }
        StateVector::from_g(g).expect("valid length")
    }

    /// Recognizes a stabilizer state up to global phase, to tolerance `tol` on
    /// unit amplitudes.
    pub fn from_statevector(state: &StateVector, tol: f64) -> Result<Self> {
        let n = state.n();
        let amps = state.unit_amplitudes();
        let not_stab = |why: &str| Error::InvalidState(format!("not a stabilizer state: {why}"));
        let support: Vec<u64> = (0..amps.len() as u64).filter(|&x| amps[x as usize].norm() > tol).collect();
        let &x0 = support.first().ok_or_else(|| not_stab("zero vector"))?;
        let dir = Subspace::span(n, support.iter().map(|x| x ^ x0))?;
        if dir.len() != support.len() {
            return Err(not_stab("support is not an affine subspace"));
        }
        let a = AffineSubspace::new(x0, dir)?;
        let ref_amp = amps[a.offset() as usize];
        let mag = 1.0 / (support.len() as f64).sqrt();
        let ratio = |x: u64| amps[x as usize] / ref_amp;
        let exponent = |x: u64| -> Result<u32> {
            let r = ratio(x);
            (0..4u32).find(|&k| (r - i_pow(k)).norm() <= tol / mag * 4.0).ok_or_else(|| not_stab("phase is not a power of i"))
        };
        let offset = a.offset();
        let basis = a.direction().basis().to_vec();
        let pivots = a.direction().pivots();
        let k = basis.len();
        let mut e = vec![0u32; k];
        for j in 0..k {
            e[j] = exponent(offset ^ basis[j])?;
        }
        let mut ell = 0u64;
        let mut q = vec![0u64; n];
        for j in 0..k {
            let p = pivots[j] as usize;
            let lj = e[j] & 1;
            ell |= (lj as u64) << p;
            if (e[j] - lj) / 2 & 1 == 1 {
                q[p] |= 1 << p;
            }
        }
        for j in 0..k {
            for l in j + 1..k {
                let ejl = exponent(offset ^ basis[j] ^ basis[l])?;
                let lin = (e[j] & 1) ^ (e[l] & 1);
                let quad_single = ((e[j] >> 1) & 1) ^ ((e[l] >> 1) & 1);
                let rest = (ejl + 4 - lin) % 4;
                if rest & 1 == 1 {
                    return Err(not_stab("inconsistent phases"));
                }
                if ((rest >> 1) & 1) ^ quad_single == 1 {
                    let (p1, p2) = (pivots[j] as usize, pivots[l] as usize);
                    q[p1.min(p2)] |= 1 << p1.max(p2);
                }
            }
        }
        let s = StabilizerState::new(a, ell, q)?;
        let phase = ref_amp / ref_amp.norm();
        let candidate = s.to_statevector().scale(phase);
        let worst = candidate
            .unit_amplitudes()
            .iter()
            .zip(&amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if worst > tol {
            return Err(not_stab("amplitudes do not match the recovered form"));
        }
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("malformed stabilizer JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stabilizer serializes")
    }
}

/// On-disk stabilizer description. Bit strings list coordinate 0 first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizerFile {
    pub n: usize,
    pub offset: String,
    pub basis: Vec<String>,
    pub ell: String,
    #[serde(rename = "Q_upper")]
    pub q_upper: Vec<String>,
}

impl From<StabilizerState> for StabilizerFile {
    fn from(s: StabilizerState) -> Self {
        let n = s.n();
        StabilizerFile {
            n,
            offset: format_bits(n, s.support.offset()),
            basis: s.support.direction().basis().iter().map(|&b| format_bits(n, b)).collect(),
            ell: format_bits(n, s.ell),
            q_upper: s.q_upper.iter().map(|&r| format_bits(n, r)).collect(),
        }
    }
}

impl TryFrom<StabilizerFile> for StabilizerState {
    type Error = Error;

    fn try_from(f: StabilizerFile) -> Result<Self> {
        let bits = |s: &str| -> Result<u64> {
            let (len, v) = parse_bits(s)?;
            if len != f.n {
                return Err(Error::DimensionMismatch { expected: f.n, found: len });
            }
            Ok(v)
        };
        let basis = f.basis.iter().map(|b| bits(b)).collect::<Result<Vec<_>>>()?;
        let direction = Subspace::span(f.n, basis.iter().copied())?;
        if direction.dim() != basis.len() {
            return Err(Error::InvalidParameter("stabilizer basis is linearly dependent".into()));
        }
        let support = AffineSubspace::new(bits(&f.offset)?, direction)?;
        let q = f.q_upper.iter().map(|r| bits(r)).collect::<Result<Vec<_>>>()?;
        StabilizerState::new(support, bits(&f.ell)?, q)
    }
}

/// 2ⁿ Π_{k=1..n} (2ᵏ + 1).
pub fn stabilizer_count(n: usize) -> u64 {
    (1..=n as u32).fold(1u64 << n, |acc, k| acc * ((1u64 << k) + 1))
}

fn all_subspaces(n: usize) -> Vec<Subspace> {
    let mut seen: HashSet<Subspace> = HashSet::new();
    let mut layer = vec![Subspace::zero(n)];
    seen.insert(Subspace::zero(n));
    let mut out = layer.clone();
    for _ in 0..n {
        let mut next = Vec::new();
        for s in &layer {
            for v in 1..1u64 << n {
                if !s.contains(v) {
                    let mut t = s.clone();
                    t.insert(v);
                    if seen.insert(t.clone()) {
                        next.push(t);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn enumerate_uncached(n: usize) -> Vec<StabilizerState> {
    let mut states = Vec::new();
    let mut seen: HashSet<Vec<(i64, i64)>> = HashSet::new();
    for dir in all_subspaces(n) {
        let offsets: Vec<u64> = {
            let mut o: Vec<u64> = (0..1u64 << n).map(|v| dir.reduce(v)).collect();
            o.sort_unstable();
            o.dedup();
            o
        };
        let pivots = dir.pivots();
        let k = pivots.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|j| (j..k).map(move |l| (j, l))).collect();
        for &offset in &offsets {
            let support = AffineSubspace::new(offset, dir.clone()).expect("offset in range");
            for lp in 0..1u64 << k {
                let ell = (0..k).filter(|j| lp >> j & 1 == 1).fold(0u64, |acc, j| acc | 1 << pivots[j]);
                for qp in 0..1u64 << pairs.len() {
                    let mut q = vec![0u64; n];
                    for (b, &(j, l)) in pairs.iter().enumerate() {
                        if qp >> b & 1 == 1 {
                            let (p1, p2) = (pivots[j] as usize, pivots[l] as usize);
                            q[p1.min(p2)] |= 1 << p1.max(p2);
                        }
                    }
                    let s = StabilizerState::new(support.clone(), ell, q).expect("valid by construction");
                    if seen.insert(phase_key(&s.to_statevector())) {
                        states.push(s);
                    }
                }
            }
        }
    }
    states
}

/// Rounded amplitudes after rotating the first nonzero one to the positive reals.
fn phase_key(state: &StateVector) -> Vec<(i64, i64)> {
    let amps = state.unit_amplitudes();
    let first = amps.iter().find(|a| a.norm() > 1e-12).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let rot = first.conj() / first.norm();
    let round = |v: f64| {
        let r = (v * 1e12).round() as i64;
        if r == 0 {
            0
        } else {
            r
        }
    };
    amps.iter().map(|a| a * rot).map(|a| (round(a.re), round(a.im))).collect()
}

/// Every n-qubit stabilizer state exactly once (n ≤ 4). Results are cached.
pub fn enumerate_stabilizers(n: usize) -> Result<&'static [StabilizerState]> {
    static CACHE: [OnceLock<Vec<StabilizerState>>; MAX_ENUM_QUBITS + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if n == 0 || n > MAX_ENUM_QUBITS {
        return Err(Error::TooLarge { what: "stabilizer enumeration", n, max: MAX_ENUM_QUBITS });
    }
    Ok(CACHE[n].get_or_init(|| enumerate_uncached(n)))
}

/// The synthesized vectors of [`enumerate_stabilizers`], in the same order.
pub fn stabilizer_vectors(n: usize) -> Result<&'static [StateVector]> {
    static CACHE: [OnceLock<Vec<StateVector>>; MAX_ENUM_QUBITS + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let states = enumerate_stabilizers(n)?;
    Ok(CACHE[n].get_or_init(|| states.iter().map(StabilizerState::to_statevector).collect()))
}
