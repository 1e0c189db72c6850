//! Constructive extraction of a stabilizer witness from a state with large
//! Gowers-3 norm.
//!
//! The pipeline runs split_real → balance → char_function → best_affine_map →
//! drop_shift → symmetrize_map → zero_diagonal_map → extract_quadratic and
//! then synthesizes the quadratic-phase stabilizer, undoing the balancing
//! circuit at the end. Every stage checks the inequality it is supposed to
//! satisfy and reports [`Error::Invariant`] if it does not.

mod search;
mod zeta;

use serde::Serialize;

use crate::charfn::{char_function, CharTable};
use crate::clifford::{balance, CliffordCircuit, StabilizerState};
use crate::gf2::{marton_k1, AffineSubspace, LinMap, Subspace, MARTON_K2};
use crate::states::{walsh_hadamard, StateVector};
use crate::{Error, Result};

pub use search::{
    best_affine_map, drop_shift, symmetrize_map, zero_diagonal_map, BestMap, CONTRACT_TOL, MAX_EXHAUSTIVE, MAX_SEARCH,
};
pub use zeta::{l_lower_bound, l_value, sample_zeta, ZetaSample, BALANCE_TOL};

/// Largest n accepted by [`extract_stabilizer`].
pub const MAX_PIPELINE_QUBITS: usize = 4;

/// Tries allowed for the balancing search inside the pipeline.
pub const BALANCE_TRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Real,
    Imaginary,
}

#[derive(Clone, Debug)]
pub struct SplitReal {
    /// The chosen part divided by √ν.
    pub state: StateVector,
    pub nu: f64,
    pub which: Part,
}

/// Keeps whichever of g_R, g_I has the larger ‖·‖⁸_{U³} (the real part on
/// ties) and renormalizes it.
pub fn split_real(state: &StateVector) -> Result<SplitReal> {
    state.ensure_normalized()?;
    let re = state.real_part();
    let im = state.imag_part();
    let u_re = char_function(&re)?.gowers3();
    let u_im = char_function(&im)?.gowers3();
    let (part, which, u_part) = if u_re >= u_im { (re, Part::Real, u_re) } else { (im, Part::Imaginary, u_im) };
    let nu = part.mass();
    if nu <= 0.0 {
        return Err(Error::InvalidState("both real and imaginary parts vanish".into()));
    }
    let out = part.normalized()?;
    let gamma = char_function(state)?.gowers3();
    let got = u_part / (nu * nu * nu * nu);
    if got < gamma / (256.0 * nu.powi(4)) - CONTRACT_TOL {
        return Err(Error::invariant("the larger part keeps 2⁻⁸ of the Gowers-3 norm", format!("{got} vs {gamma}")));
    }
    Ok(SplitReal { state: out, nu, which })
}

/// q(x) = Σ_{i<j} Q_ij x_i x_j + ⟨α, x⟩ over F₂.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticPoly {
    pub n: usize,
    /// Row i holds Q_ij for j > i.
    pub upper: Vec<u64>,
    pub linear: u64,
}

impl QuadraticPoly {
    pub fn eval(&self, x: u64) -> bool {
        let quad = self
            .upper
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, row)| acc ^ (((x >> i) & 1) as u32 & (row & x).count_ones()));
        (quad ^ (self.linear & x).count_ones()) & 1 == 1
    }

    /// The stabilizer N^(-1/2) Σ_x (−1)^{q(x)} |x⟩.
    pub fn to_stabilizer(&self) -> StabilizerState {
        let mut rows = self.upper.clone();
        for (i, r) in rows.iter_mut().enumerate() {
            *r |= ((self.linear >> i) & 1) << i;
        }
        StabilizerState::new(AffineSubspace::linear(Subspace::full(self.n)), 0, rows).expect("full support quadratic")
    }
}

#[derive(Clone, Debug)]
pub struct Quadratic {
    pub poly: QuadraticPoly,
    /// |E_x[g(x)(−1)^{q(x)}]|.
    pub correlation: f64,
    pub alpha: u64,
    /// Σ_α (Ĥg)(α)⁴.
    pub fourth_power_sum: f64,
}

/// For a symmetric zero-diagonal ℓ, sets H(x) = (−1)^{Σ_{i<j} ℓ_ij x_i x_j},
/// picks α maximizing |(Ĥg)(α)| (smallest α on ties) and returns
/// q(x) = Σ_{i<j} ℓ_ij x_i x_j + ⟨α, x⟩.
pub fn extract_quadratic(g: &[f64], l: &LinMap) -> Result<Quadratic> {
    let n = l.n();
    if g.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: g.len() });
    }
    if !l.is_symmetric() || l.diagonal() != 0 {
        return Err(Error::InvalidParameter("extract_quadratic needs a symmetric zero-diagonal map".into()));
    }
    let upper: Vec<u64> = l.rows().iter().enumerate().map(|(i, r)| r & !((2u64 << i) - 1)).collect();
    let h = QuadraticPoly { n, upper: upper.clone(), linear: 0 };
    let hg: Vec<f64> = g.iter().enumerate().map(|(x, v)| if h.eval(x as u64) { -v } else { *v }).collect();
    let spec = walsh_hadamard(&hg)?;
    let (alpha, correlation) = spec
        .iter()
        .enumerate()
        .fold((0usize, -1.0f64), |b, (a, v)| if v.abs() > b.1 + 1e-12 { (a, v.abs()) } else { b });
    let fourth_power_sum: f64 = spec.iter().map(|v| v.powi(4)).sum();
    let square_sum: f64 = spec.iter().map(|v| v * v).sum();
    if correlation * correlation * square_sum < fourth_power_sum - CONTRACT_TOL {
        return Err(Error::invariant("max² · Σ(Ĥg)² ≥ Σ(Ĥg)⁴", format!("{correlation}² vs {fourth_power_sum}")));
    }
    Ok(Quadratic { poly: QuadraticPoly { n, upper, linear: alpha as u64 }, correlation, alpha: alpha as u64, fourth_power_sum })
}

/// Graph sums Σ_{z∈G(ℓ)} f(z)/N after each map stage.
#[derive(Clone, Debug, Serialize)]
pub struct StageValues {
    pub affine: f64,
    pub linear: f64,
    pub symmetric: f64,
    pub zero_diagonal: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineTrace {
    pub n: usize,
    pub seed: u64,
    pub gamma: f64,
    pub nu: f64,
    pub part: Part,
    pub balance_circuit: CliffordCircuit,
    pub balanced_fourth_moment: f64,
    pub max_row_sum: f64,
    pub affine_map: String,
    pub affine_shift: String,
    pub map_search_exhaustive: bool,
    pub linear_map: String,
    pub symmetric_map: String,
    pub zero_diagonal_map: String,
    pub best_map_value: StageValues,
    pub q_poly: QuadraticPoly,
    pub correlation: f64,
    /// ν · correlation², the floor the final overlap must clear.
    pub overlap_floor: f64,
    pub final_overlap: f64,
    pub witness: StabilizerState,
    /// log₁₀ of the worst-case guarantee γ^{C₂}/C₁ on |⟨s|φ⟩|. Informational.
    pub log10_theoretical_floor: f64,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub witness: StabilizerState,
    pub overlap: f64,
    pub trace: PipelineTrace,
}

/// log₁₀(γ^{C₂}/C₁) with C₂ = 4K₂ + 6 and C₁ = 6·K₁²·54^{2K₂+2}·2^{32K₂+48}.
pub fn log10_theoretical_floor(gamma: f64) -> f64 {
    let k2 = MARTON_K2 as f64;
    let c2 = 4.0 * k2 + 6.0;
    let log_c1 =
        6f64.log10() + 2.0 * marton_k1().log10() + (2.0 * k2 + 2.0) * 54f64.log10() + (32.0 * k2 + 48.0) * 2f64.log10();
    c2 * gamma.log10() - log_c1
}

fn check(identity: &'static str, lhs: f64, rhs: f64) -> Result<()> {
    if lhs < rhs - CONTRACT_TOL {
        return Err(Error::invariant(identity, format!("{lhs} < {rhs}")));
    }
    Ok(())
}

/// Runs the full pipeline and returns the witness s with its overlap |⟨s|φ⟩|².
pub fn extract_stabilizer(state: &StateVector, seed: u64) -> Result<Extraction> {
    let n = state.n();
    if n > MAX_PIPELINE_QUBITS {
        return Err(Error::TooLarge { what: "stabilizer extraction", n, max: MAX_PIPELINE_QUBITS });
    }
    state.ensure_normalized()?;
    let gamma = char_function(state)?.gowers3();
    let split = split_real(state)?;
    let (circuit, balanced) = balance(&split.state, BALANCE_TRIES, seed)?;
    let t: CharTable = char_function(&balanced)?;
    let max_row_sum = t.max_row_sum();
    if max_row_sum > 3.0 + BALANCE_TOL {
        return Err(Error::invariant("balanced rows sum to at most 3", format!("max row sum {max_row_sum}")));
    }
    let big_n = t.big_n();

    let best = best_affine_map(&t, seed)?;
    let (linear, v_lin) = drop_shift(&best.map, &t)?;
    let (symmetric, v_sym) = symmetrize_map(&linear, &t)?;
    let (zero_diag, v_zd) = zero_diagonal_map(&symmetric, &t)?;
    let quad = extract_quadratic(&balanced.real_values(), &zero_diag)?;
    let identity_gap = (quad.fourth_power_sum - v_zd / big_n).abs();
    if identity_gap > CONTRACT_TOL {
        return Err(Error::invariant(
            "Σ(Ĥg)⁴ = (1/N) Σ_y f(y, ℓ(y))",
            format!("{} vs {}", quad.fourth_power_sum, v_zd / big_n),
        ));
    }

    let s_prime = quad.poly.to_stabilizer().to_statevector();
    let s_vec = circuit.inverse().apply(&s_prime)?;
    let witness = StabilizerState::from_statevector(&s_vec, 1e-9)?;
    let overlap = witness.to_statevector().overlap(state)?;
    let direct = s_vec.overlap(state)?;
    if (overlap - direct).abs() > 1e-9 {
        return Err(Error::invariant("recognized witness matches the synthesized vector", format!("{overlap} vs {direct}")));
    }
    let floor = split.nu * quad.correlation * quad.correlation;
    check("overlap ≥ ν · correlation²", overlap, floor)?;

    let trace = PipelineTrace {
        n,
        seed,
        gamma,
        nu: split.nu,
        part: split.which,
        balanced_fourth_moment: balanced.fourth_moment(),
        balance_circuit: circuit,
        max_row_sum,
        affine_map: best.map.linear.to_string(),
        affine_shift: crate::gf2::format_bits(n, best.map.shift),
        map_search_exhaustive: best.exhaustive,
        linear_map: linear.to_string(),
        symmetric_map: symmetric.to_string(),
        zero_diagonal_map: zero_diag.to_string(),
        best_map_value: StageValues {
            affine: best.value / big_n,
            linear: v_lin / big_n,
            symmetric: v_sym / big_n,
            zero_diagonal: v_zd / big_n,
        },
        q_poly: quad.poly,
        correlation: quad.correlation,
        overlap_floor: floor,
        final_overlap: overlap,
        witness: witness.clone(),
        log10_theoretical_floor: log10_theoretical_floor(gamma),
    };
    Ok(Extraction { witness, overlap, trace })
}
