//! Graph-sum optimization over maps F₂ⁿ → F₂ⁿ and the map refinements that
//! carry an affine map down to a symmetric zero-diagonal linear map.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::CharTable;
use crate::gf2::{AffineMap, LinMap};
use crate::{Error, Result};

/// Largest n searched exhaustively by [`best_affine_map`].
pub const MAX_EXHAUSTIVE: usize = 4;

/// Largest n accepted at all (hill climbing above [`MAX_EXHAUSTIVE`]).
pub const MAX_SEARCH: usize = 6;

/// Restarts used by the hill-climbing fallback.
pub const RESTARTS: u64 = 64;

/// Values closer than this count as ties, which go to the smaller code.
const TIE_TOL: f64 = 1e-12;

/// Slack allowed on the stage inequalities.
pub const CONTRACT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct BestMap {
    pub map: AffineMap,
    pub value: f64,
    pub exhaustive: bool,
}

fn graph_value(t: &CharTable, map: &AffineMap) -> f64 {
    t.graph_sum(map).expect("dimensions checked by caller")
}

/// True when (v, code) beats (best_v, best_code).
fn better(v: f64, code: u64, best_v: f64, best_code: u64) -> bool {
    v > best_v + TIE_TOL || (v >= best_v - TIE_TOL && code < best_code)
}

/// Maximizes Σ_y t(y, ℓ(y)) over affine maps ℓ. Exhaustive for n ≤ 4, with
/// ties going to the smallest packed encoding. For n ∈ {5, 6} a seeded
/// single-bit-flip hill climb with 64 restarts returns a local optimum.
pub fn best_affine_map(t: &CharTable, seed: u64) -> Result<BestMap> {
    let n = t.n();
    if n == 0 || n > MAX_SEARCH {
        return Err(Error::TooLarge { what: "affine map search", n, max: MAX_SEARCH });
    }
    let bits = n * n + n;
    if n <= MAX_EXHAUSTIVE {
        let total = 1u64 << bits;
        let chunk = 1u64 << 12;
        let (value, code) = (0..total.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut best = (f64::NEG_INFINITY, u64::MAX);
                for code in c * chunk..((c + 1) * chunk).min(total) {
                    let v = graph_value(t, &AffineMap::from_code(n, code));
                    if better(v, code, best.0, best.1) {
                        best = (v, code);
                    }
                }
                best
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((f64::NEG_INFINITY, u64::MAX), |b, (v, c)| if better(v, c, b.0, b.1) { (v, c) } else { b });
        return Ok(BestMap { map: AffineMap::from_code(n, code), value, exhaustive: true });
    }
    let (value, code) = (0..RESTARTS)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(seed, r);
            let mut code = rng.random_range(0..1u64 << bits);
            let mut v = graph_value(t, &AffineMap::from_code(n, code));
            loop {
                let mut step = (v, code);
                for b in 0..bits {
                    let c = code ^ (1 << b);
                    let cv = graph_value(t, &AffineMap::from_code(n, c));
                    if cv > step.0 + TIE_TOL {
                        step = (cv, c);
                    }
                }
                if step.1 == code {
                    break (v, code);
                }
                (v, code) = step;
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::NEG_INFINITY, u64::MAX), |b, (v, c)| if better(v, c, b.0, b.1) { (v, c) } else { b });
    Ok(BestMap { map: AffineMap::from_code(n, code), value, exhaustive: false })
}

fn contract(identity: &'static str, lhs: f64, rhs: f64) -> Result<()> {
    if lhs < rhs - CONTRACT_TOL {
        return Err(Error::invariant(identity, format!("{lhs} < {rhs}")));
    }
    Ok(())
}

/// Drops the shift of an affine map. The graph sum cannot decrease since the
/// linear graph is a subspace and the affine graph is a coset of it.
pub fn drop_shift(map: &AffineMap, t: &CharTable) -> Result<(LinMap, f64)> {
    let before = t.graph_sum(map)?;
    let linear = map.linear.clone();
    let after = t.graph_sum(&AffineMap::new(linear.clone(), 0)?)?;
    contract("dropping the shift does not decrease the graph sum", after, before)?;
    Ok((linear, after))
}

/// Symmetric maps agreeing with `l` on Y = ker(ℓ + ℓᵗ), as (code, map).
fn symmetric_completions(l: &LinMap) -> Vec<LinMap> {
    let n = l.n();
    let y = l.add(&l.transpose()).kernel();
    let basis = y.basis().to_vec();
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    (0..1u64 << slots.len())
        .into_par_iter()
        .filter_map(|mask| {
            let mut rows = vec![0u64; n];
            for (b, &(i, j)) in slots.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    rows[i] |= 1 << j;
                    rows[j] |= 1 << i;
                }
            }
            let cand = LinMap::from_rows(n, &rows).expect("rows fit");
            basis.iter().all(|&v| cand.apply_bits(v) == l.apply_bits(v)).then_some(cand)
        })
        .collect()
}

/// Returns a symmetric ℓ′ with ℓ′ = ℓ on ker(ℓ + ℓᵗ). Among all such maps the
/// one with the largest graph sum is taken (smallest code on ties). The graph
/// sum obeys value(ℓ′) ≥ value(ℓ)²/N, which is checked.
pub fn symmetrize_map(l: &LinMap, t: &CharTable) -> Result<(LinMap, f64)> {
    let n = l.n();
    if n != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), found: n });
    }
    if n > MAX_SEARCH {
        return Err(Error::TooLarge { what: "symmetric completion", n, max: MAX_SEARCH });
    }
    let before = t.graph_sum(&AffineMap::new(l.clone(), 0)?)?;
    if l.is_symmetric() {
        return Ok((l.clone(), before));
    }
    let mut best: Option<(f64, u64, LinMap)> = None;
    for cand in symmetric_completions(l) {
        let v = t.graph_sum(&AffineMap::new(cand.clone(), 0)?)?;
        let code = cand.code();
        if best.as_ref().map_or(true, |(bv, bc, _)| better(v, code, *bv, *bc)) {
            best = Some((v, code, cand));
        }
    }
    let (value, _, map) =
        best.ok_or_else(|| Error::invariant("a symmetric completion exists", "no candidate agreed on the kernel"))?;
    contract("symmetrizing squares at worst (η → η²)", value, before * before / t.big_n())?;
    Ok((map, value))
}

/// ℓ′ = ℓ + v⟨v, ·⟩ with v the diagonal of ℓ, which zeroes the diagonal.
pub fn zero_diagonal_map(l: &LinMap, t: &CharTable) -> Result<(LinMap, f64)> {
    if !l.is_symmetric() {
        return Err(Error::InvalidParameter("zero_diagonal_map needs a symmetric map".into()));
    }
    let v = l.diagonal();
    let out = l.add(&LinMap::outer(l.n(), v, v));
    let before = t.graph_sum(&AffineMap::new(l.clone(), 0)?)?;
    let after = t.graph_sum(&AffineMap::new(out.clone(), 0)?)?;
    contract("zeroing the diagonal does not decrease the graph sum", after, before)?;
    Ok((out, after))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::char_function;
    use crate::states::{haar_state, t_tensor, StateVector};
    use rand::SeedableRng;

    fn x1x2() -> StateVector {
        StateVector::from_real_g(&[1.0, 1.0, 1.0, -1.0]).unwrap()
    }

    fn brute_best(t: &CharTable) -> f64 {
        let n = t.n();
        (0..1u64 << (n * n + n)).map(|c| graph_value(t, &AffineMap::from_code(n, c))).fold(f64::MIN, f64::max)
    }

    #[test]
    fn best_map_examples() {
        let t = char_function(&StateVector::uniform(3).unwrap()).unwrap();
        let b = best_affine_map(&t, 0).unwrap();
        assert_eq!(b.map.code(), 0);
        assert!((b.value - 8.0).abs() < 1e-12 && b.exhaustive);
        let t = char_function(&x1x2()).unwrap();
        let b = best_affine_map(&t, 0).unwrap();
        assert_eq!(b.map.linear, LinMap::from_rows(2, &[0b10, 0b01]).unwrap());
        assert_eq!(b.map.shift, 0);
        assert!((b.value - 4.0).abs() < 1e-12);
        let t = char_function(&t_tensor(1).unwrap()).unwrap();
        let b = best_affine_map(&t, 0).unwrap();
        assert!((b.value - 1.5).abs() < 1e-12);
        let identity = AffineMap::new(LinMap::identity(1), 0).unwrap();
        assert!((t.graph_sum(&identity).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_search_matches_brute_force() {
        for seed in 0..6 {
            let n = 1 + seed as usize % 3;
            let t = char_function(&haar_state(n, seed).unwrap()).unwrap();
            assert!((best_affine_map(&t, 0).unwrap().value - brute_best(&t)).abs() < 1e-12);
        }
    }

    #[test]
    fn hill_climb_is_flagged_and_reasonable() {
        let g: Vec<f64> = (0..32u64).map(|x| if (x & 1) * ((x >> 3) & 1) == 1 { -1.0 } else { 1.0 }).collect();
        let t = char_function(&StateVector::from_real_g(&g).unwrap()).unwrap();
        let b = best_affine_map(&t, 5).unwrap();
        assert!(!b.exhaustive);
        assert!(b.value <= 32.0 + 1e-9);
        assert_eq!(b.value, best_affine_map(&t, 5).unwrap().value);
    }

    #[test]
    fn drop_shift_examples() {
        let t = char_function(&t_tensor(1).unwrap()).unwrap();
        let shifted = AffineMap::new(LinMap::identity(1), 1).unwrap();
        assert!((t.graph_sum(&shifted).unwrap() - 0.5).abs() < 1e-12);
        let (l, v) = drop_shift(&shifted, &t).unwrap();
        assert_eq!(l, LinMap::identity(1));
        assert!((v - 1.5).abs() < 1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for seed in 0..50 {
            let n = 1 + seed as usize % 4;
            let s = haar_state(n, seed).unwrap().real_part().normalized().unwrap();
            let t = char_function(&s).unwrap();
            let m = AffineMap::from_code(n, rng.random_range(0..1u64 << (n * n + n)));
            drop_shift(&m, &t).unwrap();
        }
    }

    #[test]
    fn symmetrize_examples_and_square_law() {
        let t = char_function(&x1x2()).unwrap();
        let l = LinMap::from_rows(2, &[0b10, 0]).unwrap();
        assert!((t.graph_sum(&AffineMap::new(l.clone(), 0).unwrap()).unwrap() - 2.0).abs() < 1e-12);
        let (s, v) = symmetrize_map(&l, &t).unwrap();
        assert_eq!(s, LinMap::from_rows(2, &[0b10, 0b01]).unwrap());
        assert!((v - 4.0).abs() < 1e-12);
        let sym = LinMap::from_rows(2, &[0b11, 0b01]).unwrap();
        assert_eq!(symmetrize_map(&sym, &t).unwrap().0, sym);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for seed in 0..60 {
            let n = 1 + seed as usize % 4;
            let s = haar_state(n, seed).unwrap().real_part().normalized().unwrap();
            let t = char_function(&s).unwrap();
            let l = LinMap::from_code(n, rng.random_range(0..1u64 << (n * n)));
            let (sym, _) = symmetrize_map(&l, &t).unwrap();
            assert!(sym.is_symmetric());
            for y in l.add(&l.transpose()).kernel().elements() {
                assert_eq!(sym.apply_bits(y), l.apply_bits(y));
            }
        }
    }

    #[test]
    fn zero_diagonal_examples() {
        let t = char_function(&x1x2()).unwrap();
        let off = LinMap::from_rows(2, &[0b10, 0b01]).unwrap();
        assert_eq!(zero_diagonal_map(&off, &t).unwrap().0, off);
        let (l, _) = zero_diagonal_map(&LinMap::identity(2), &t).unwrap();
        assert_eq!(l, off);
        let tr = t_tensor(1).unwrap().real_part().normalized().unwrap();
        let t1 = char_function(&tr).unwrap();
        let (l, after) = zero_diagonal_map(&LinMap::identity(1), &t1).unwrap();
        assert_eq!(l, LinMap::zero(1));
        assert!(after >= t1.graph_sum(&AffineMap::new(LinMap::identity(1), 0).unwrap()).unwrap());
        assert!(zero_diagonal_map(&LinMap::from_rows(2, &[0b10, 0]).unwrap(), &t).is_err());
    }
}
