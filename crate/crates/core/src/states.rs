//! Dense state vectors, Boolean Fourier analysis and named state families.
//!
//! States use the `g` convention |φ⟩ = N^(-1/2) Σₓ g(x)|x⟩ with N = 2ⁿ, so a
//! normalized state has E_x|g(x)|² = 1 and the uniform superposition is g ≡ 1.
//! Conversion to and from unit-vector amplitudes happens only at the I/O
//! boundary. Global phases are never canonicalized.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::clifford::StabilizerState;
use crate::{Error, Result};

/// Largest qubit count a dense state may have.
pub const MAX_QUBITS: usize = 12;

/// Tolerance on E|g|² for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance on the unit-vector norm accepted by the JSON loader.
pub const LOAD_NORM_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    g: Vec<Complex64>,
}

fn check_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

impl StateVector {
    /// Wraps a `g` table. The table need not be normalized.
    pub fn from_g(g: Vec<Complex64>) -> Result<Self> {
        let n = check_len(g.len())?;
        if n > MAX_QUBITS {
            return Err(Error::TooLarge { what: "state vector", n, max: MAX_QUBITS });
        }
        Ok(StateVector { n, g })
    }

    pub fn from_real_g(g: &[f64]) -> Result<Self> {
        Self::from_g(g.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Builds from unit-vector amplitudes ⟨x|φ⟩.
    pub fn from_unit_amplitudes(amps: &[Complex64]) -> Result<Self> {
        let scale = (amps.len() as f64).sqrt();
        Self::from_g(amps.iter().map(|a| a * scale).collect())
    }

    pub fn basis(n: usize, x0: u64) -> Result<Self> {
        let len = 1usize << n;
        if x0 as usize >= len {
            return Err(Error::InvalidParameter(format!("basis index {x0} out of range for n = {n}")));
        }
        let mut g = vec![Complex64::new(0.0, 0.0); len];
        g[x0 as usize] = Complex64::new((len as f64).sqrt(), 0.0);
        Self::from_g(g)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_g(vec![Complex64::new(1.0, 0.0); 1 << n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// N = 2ⁿ.
    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn into_g(self) -> Vec<Complex64> {
        self.g
    }

    /// ⟨x|φ⟩ = g(x)/√N.
    pub fn unit_amplitudes(&self) -> Vec<Complex64> {
        let scale = 1.0 / (self.dim() as f64).sqrt();
        self.g.iter().map(|a| a * scale).collect()
    }

    /// E_x |g(x)|², which equals ⟨φ|φ⟩.
    pub fn mass(&self) -> f64 {
        self.g.iter().map(|a| a.norm_sqr()).sum::<f64>() / self.dim() as f64
    }

    pub fn is_normalized(&self) -> bool {
        (self.mass() - 1.0).abs() <= NORM_TOL
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::InvalidState(format!("state is not normalized (E|g|² = {})", self.mass())))
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let m = self.mass();
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        let s = 1.0 / m.sqrt();
        Ok(StateVector { n: self.n, g: self.g.iter().map(|a| a * s).collect() })
    }

    /// ⟨self|other⟩ = E_x[conj(g_self(x)) g_other(x)].
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let s: Complex64 = self.g.iter().zip(&other.g).map(|(a, b)| a.conj() * b).sum();
        Ok(s / self.dim() as f64)
    }

    /// |⟨self|other⟩|².
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// self ⊗ other; the qubits of `self` come first (low coordinates).
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(Error::TooLarge { what: "state vector", n, max: MAX_QUBITS });
        }
        let mut g = Vec::with_capacity(1 << n);
        for b in &other.g {
            for a in &self.g {
                g.push(a * b);
            }
        }
        Self::from_g(g)
    }

    pub fn is_real(&self) -> bool {
        self.g.iter().all(|a| a.im == 0.0)
    }

    /// The real part as a (generally unnormalized) state.
    pub fn real_part(&self) -> Self {
        StateVector { n: self.n, g: self.g.iter().map(|a| Complex64::new(a.re, 0.0)).collect() }
    }

    /// The imaginary part g_I (so g = g_R + i g_I) as a real state.
    pub fn imag_part(&self) -> Self {
        StateVector { n: self.n, g: self.g.iter().map(|a| Complex64::new(a.im, 0.0)).collect() }
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.g.iter().map(|a| a.re).collect()
    }

    /// E_x |g(x)|⁴ = N Σₓ |⟨x|φ⟩|⁴.
    pub fn fourth_moment(&self) -> f64 {
        self.g.iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>() / self.dim() as f64
    }

    pub fn scale(&self, c: Complex64) -> Self {
        StateVector { n: self.n, g: self.g.iter().map(|a| a * c).collect() }
    }

    /// Linear combination Σ cᵢ |ψᵢ⟩ (same n for all terms).
    pub fn combination(terms: &[(Complex64, &StateVector)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidParameter("empty combination".into()));
        };
        let mut g = vec![Complex64::new(0.0, 0.0); first.dim()];
        for (c, s) in terms {
            if s.n != first.n {
                return Err(Error::DimensionMismatch { expected: first.n, found: s.n });
            }
            for (acc, a) in g.iter_mut().zip(&s.g) {
                *acc += c * a;
            }
        }
        Self::from_g(g)
    }
}

/// Values the transforms can act on.
pub trait Scalar:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
}

impl<T> Scalar for T where
    T: Copy + Send + Sync + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Mul<f64, Output = T>
{
}

/// Unnormalized in-place butterfly: a(α) ← Σₓ (−1)^⟨α,x⟩ a(x).
pub fn fwht_in_place<T: Scalar>(a: &mut [T]) -> Result<()> {
    check_len(a.len())?;
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// ĝ(α) = E_x[(−1)^⟨α,x⟩ g(x)].
pub fn walsh_hadamard<T: Scalar>(g: &[T]) -> Result<Vec<T>> {
    let mut out = g.to_vec();
    fwht_in_place(&mut out)?;
    let s = 1.0 / g.len() as f64;
    out.iter_mut().for_each(|v| *v = *v * s);
    Ok(out)
}

/// Inverse of [`walsh_hadamard`]: g(x) = Σ_α (−1)^⟨α,x⟩ ĝ(α).
pub fn inverse_walsh_hadamard<T: Scalar>(ghat: &[T]) -> Result<Vec<T>> {
    let mut out = ghat.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

/// (f ∗ g)(x) = E_y[f(y) g(x + y)], computed through the transform.
pub fn convolve<T: Scalar>(f: &[T], g: &[T]) -> Result<Vec<T>> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: g.len() });
    }
    let fh = walsh_hadamard(f)?;
    let gh = walsh_hadamard(g)?;
    let prod: Vec<T> = fh.iter().zip(&gh).map(|(a, b)| *a * *b).collect();
    inverse_walsh_hadamard(&prod)
}

/// Δ_y g(x) = g(x)·conj(g(x + y)).
pub fn phase_derivative(g: &[Complex64], y: u64) -> Result<Vec<Complex64>> {
    check_len(g.len())?;
    if y as usize >= g.len() {
        return Err(Error::DimensionMismatch { expected: g.len(), found: y as usize });
    }
    let y = y as usize;
    Ok((0..g.len()).map(|x| g[x] * g[x ^ y].conj()).collect())
}

/// Real counterpart of [`phase_derivative`].
pub fn phase_derivative_real(g: &[f64], y: u64) -> Result<Vec<f64>> {
    check_len(g.len())?;
    let y = y as usize;
    if y >= g.len() {
        return Err(Error::DimensionMismatch { expected: g.len(), found: y });
    }
    Ok((0..g.len()).map(|x| g[x] * g[x ^ y]).collect())
}

/// Named state families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Basis { x0: u64 },
    Uniform,
    Haar { seed: u64 },
    /// |T⟩^⊗n with |T⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2.
    TTensor,
    Stabilizer { state: StabilizerState },
    /// The normalized state ∝ √(1−ε)|s⟩ + √ε|ψ_haar(seed)⟩.
    Interpolate { state: StabilizerState, seed: u64, eps: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub n: usize,
    #[serde(flatten)]
    pub family: Family,
}

impl FamilySpec {
    pub fn new(n: usize, family: Family) -> Self {
        FamilySpec { n, family }
    }
}

/// A Haar-random state: complex Gaussian amplitudes, normalized.
pub fn haar_state(n: usize, seed: u64) -> Result<StateVector> {
    if n > MAX_QUBITS {
        return Err(Error::TooLarge { what: "state vector", n, max: MAX_QUBITS });
    }
    let mut rng = crate::rng::stream(seed, 0);
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_unit_amplitudes(&amps.iter().map(|a| a / norm).collect::<Vec<_>>())
}

pub fn t_tensor(n: usize) -> Result<StateVector> {
    let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    StateVector::from_g((0..1u64 << n).map(|x| w.powu(x.count_ones())).collect())
}

pub fn make_state(spec: &FamilySpec) -> Result<StateVector> {
    let n = spec.n;
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooLarge { what: "state family", n, max: MAX_QUBITS });
    }
    let check_stab = |s: &StabilizerState| -> Result<()> {
        if s.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: s.n() });
        }
        Ok(())
    };
    match &spec.family {
        Family::Basis { x0 } => StateVector::basis(n, *x0),
        Family::Uniform => StateVector::uniform(n),
        Family::Haar { seed } => haar_state(n, *seed),
        Family::TTensor => t_tensor(n),
        Family::Stabilizer { state } => {
            check_stab(state)?;
            Ok(state.to_statevector())
        }
        Family::Interpolate { state, seed, eps } => {
            check_stab(state)?;
            if !(0.0..=1.0).contains(eps) {
                return Err(Error::InvalidParameter(format!("interpolation weight {eps} outside [0, 1]")));
            }
            let s = state.to_statevector();
            let h = haar_state(n, *seed)?;
            if *eps == 0.0 {
                return Ok(s);
            }
            if *eps == 1.0 {
                return Ok(h);
            }
            let mix = StateVector::combination(&[
                (Complex64::new((1.0 - eps).sqrt(), 0.0), &s),
                (Complex64::new(eps.sqrt(), 0.0), &h),
            ])?;
            mix.normalized()
        }
    }
}

/// On-disk state format: unit-vector amplitudes as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &StateVector) -> Self {
        StateFile {
            n: state.n(),
            amplitudes: state.unit_amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    /// Converts to the `g` convention. The unit norm must be within
    /// [`LOAD_NORM_TOL`] of 1 unless `renormalize` is set.
    pub fn into_state(self, renormalize: bool) -> Result<StateVector> {
        if self.n > MAX_QUBITS {
            return Err(Error::TooLarge { what: "state file", n: self.n, max: MAX_QUBITS });
        }
        if self.amplitudes.len() != 1 << self.n {
            return Err(Error::InvalidState(format!(
                "expected {} amplitudes for n = {}, found {}",
                1usize << self.n,
                self.n,
                self.amplitudes.len()
            )));
        }
        let amps: Vec<Complex64> = self.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state = StateVector::from_unit_amplitudes(&amps)?;
        if renormalize {
            return state.normalized();
        }
        if (norm - 1.0).abs() > LOAD_NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} deviates from 1 (pass --renormalize to rescale)")));
        }
        Ok(state)
    }
}

pub fn state_from_json(text: &str, renormalize: bool) -> Result<StateVector> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidState(format!("malformed state JSON: {e}")))?;
    file.into_state(renormalize)
}

pub fn state_to_json(state: &StateVector) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(state)).expect("state serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_table(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
        (0..len).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    fn brute_transform(g: &[Complex64]) -> Vec<Complex64> {
        let n = g.len();
        (0..n)
            .map(|a| {
                let s: Complex64 = (0..n)
                    .map(|x| if ((a & x).count_ones() & 1) == 1 { -g[x] } else { g[x] })
                    .sum();
                s / n as f64
            })
            .collect()
    }

    fn brute_convolve(f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        let n = f.len();
        (0..n).map(|x| (0..n).map(|y| f[y] * g[x ^ y]).sum::<Complex64>() / n as f64).collect()
    }

    #[test]
    fn transform_examples() {
        let h = walsh_hadamard(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(h, vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let r2 = 2f64.sqrt();
        let h = walsh_hadamard(&[c(r2, 0.0), c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(h[0].re, r2 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h[1].re, r2 / 2.0, epsilon = 1e-15);
        let h = walsh_hadamard(&[1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(h, vec![0.5, 0.5, 0.5, -0.5]);
        assert!(matches!(walsh_hadamard(&[1.0, 2.0, 3.0]), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn transform_matches_definition_and_inverts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in 0..=6 {
            let g = random_table(&mut rng, 1 << n);
            let fast = walsh_hadamard(&g).unwrap();
            let slow = brute_transform(&g);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12);
            }
            let back = inverse_walsh_hadamard(&fast).unwrap();
            for (a, b) in back.iter().zip(&g) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_on_random_states() {
        for seed in 0..100 {
            let s = haar_state(1 + (seed as usize % 6), seed).unwrap();
            let gh = walsh_hadamard(s.g()).unwrap();
            let lhs: f64 = gh.iter().map(|a| a.norm_sqr()).sum();
            assert!((lhs - s.mass()).abs() < 1e-12);
            assert!(s.is_normalized());
        }
    }

    #[test]
    fn convolution_theorem() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for n in 1..=5 {
            let f = random_table(&mut rng, 1 << n);
            let g = random_table(&mut rng, 1 << n);
            let conv = brute_convolve(&f, &g);
            let lhs = walsh_hadamard(&conv).unwrap();
            let (fh, gh) = (walsh_hadamard(&f).unwrap(), walsh_hadamard(&g).unwrap());
            for a in 0..1 << n {
                assert!((lhs[a] - fh[a] * gh[a]).norm() < 1e-12);
            }
            let fast = convolve(&f, &g).unwrap();
            for (a, b) in fast.iter().zip(&conv) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_derivative_examples() {
        let s = haar_state(3, 9).unwrap();
        let d0 = phase_derivative(s.g(), 0).unwrap();
        for (d, a) in d0.iter().zip(s.g()) {
            assert!((d.re - a.norm_sqr()).abs() < 1e-15 && d.im == 0.0);
        }
        let pm = [1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0];
        for y in 0..8 {
            assert!(phase_derivative_real(&pm, y).unwrap().iter().all(|v| v.abs() == 1.0));
        }
        let t = t_tensor(1).unwrap();
        let d = phase_derivative(t.g(), 1).unwrap();
        let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((d[0] - w.conj()).norm() < 1e-15);
        assert!((d[1] - w).norm() < 1e-15);
        assert!(phase_derivative(t.g(), 2).is_err());
    }

    #[test]
    fn family_examples() {
        let b = make_state(&FamilySpec::new(2, Family::Basis { x0: 0 })).unwrap();
        assert_eq!(b.g(), &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let u = make_state(&FamilySpec::new(3, Family::Uniform)).unwrap();
        assert!(u.g().iter().all(|a| *a == c(1.0, 0.0)));
        let t = make_state(&FamilySpec::new(1, Family::TTensor)).unwrap();
        assert_eq!(t.g()[0], c(1.0, 0.0));
        assert!((t.g()[1] - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
        let h1 = make_state(&FamilySpec::new(4, Family::Haar { seed: 3 })).unwrap();
        let h2 = make_state(&FamilySpec::new(4, Family::Haar { seed: 3 })).unwrap();
        assert_eq!(h1, h2);
        assert!(h1.is_normalized());
    }

    #[test]
    fn interpolation_endpoints_are_exact() {
        let stab = StabilizerState::zero(3);
        let at = |eps: f64| make_state(&FamilySpec::new(3, Family::Interpolate { state: stab.clone(), seed: 5, eps }));
        assert_eq!(at(0.0).unwrap(), stab.to_statevector());
        assert_eq!(at(1.0).unwrap(), haar_state(3, 5).unwrap());
        assert!(at(0.3).unwrap().is_normalized());
        assert!(matches!(at(1.5), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = haar_state(3, 11).unwrap();
        let back = state_from_json(&state_to_json(&s), false).unwrap();
        for (a, b) in back.g().iter().zip(s.g()) {
            assert!((a - b).norm() < 1e-12);
        }
        let bad = r#"{"n": 1, "amplitudes": [[1.0, 0.0], [1.0, 0.0]]}"#;
        assert!(matches!(state_from_json(bad, false), Err(Error::InvalidState(_))));
        let fixed = state_from_json(bad, true).unwrap();
        assert!(fixed.is_normalized());
        assert!(state_from_json(r#"{"n": 2, "amplitudes": [[1.0, 0.0]]}"#, true).is_err());
    }

    #[test]
    fn tensor_orders_qubits_low_first() {
        let a = StateVector::basis(1, 1).unwrap();
        let b = StateVector::basis(2, 0).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab, StateVector::basis(3, 1).unwrap());
    }
}
