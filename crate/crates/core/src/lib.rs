//! Desk-scale toolkit for stabilizer property testing.
//!
//! Everything here works on dense objects indexed by F₂ⁿ or F₂²ⁿ and is meant
//! for small qubit counts (n ≤ 6, often n ≤ 4). The modules are:
//!
//! - [`gf2`]: bit vectors, subspaces, linear and affine maps over F₂, the
//!   symplectic form and the affine covering construction.
//! - [`states`]: dense state vectors in the `g` convention
//!   (|φ⟩ = N^(-1/2) Σ g(x)|x⟩), Walsh–Hadamard transforms and state families.
//! - [`clifford`]: Weyl operators, Clifford circuits, real-Clifford sampling,
//!   stabilizer canonical forms and enumeration, and the balancing search.
//! - [`charfn`]: the characteristic function f(y, α) = |⟨φ|XʸZᵅ|φ⟩|² and the
//!   Bell difference distribution q = f ∗ f.
//! - [`measures`]: Gowers norms, stabilizer fidelity and rank, Gram matrices.
//! - [`witness`]: the constructive pipeline that turns a state with large
//!   Gowers-3 norm into an explicit stabilizer witness.
//! - [`tester`]: Monte Carlo Bell difference sampling and the two testers.

pub mod charfn;
pub mod clifford;
mod error;
pub mod gf2;
pub mod measures;
pub mod rng;
pub mod states;
pub mod tester;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Absolute tolerance used for exact identities on floating point tables.
pub const EXACT_TOL: f64 = 1e-9;
