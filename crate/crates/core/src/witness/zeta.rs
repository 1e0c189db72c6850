use rand::Rng;
use serde::Serialize;

use crate::charfn::CharTable;
use crate::{Error, Result};

/// Row sums above 3 by more than this mean the table was not balanced.
pub const BALANCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct ZetaSample {
    /// ζ(y) for every y, in encoding order.
    pub zeta: Vec<u64>,
    /// Exact fraction of pairs (y₁, y₂) meeting all four conditions of L(ζ).
    pub l_value: f64,
}

/// Draws ζ(y) = α with probability f(y, α)/r(y) independently for each y
/// (ζ(y) = 0 when r(y) = 0), then evaluates L(ζ) exactly.
pub fn sample_zeta(t: &CharTable, delta: f64, seed: u64) -> Result<ZetaSample> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let n = t.n();
    let rows = t.row_sums();
    let worst = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if worst > 3.0 + BALANCE_TOL {
        return Err(Error::Unbalanced { row_sum: worst });
    }
    let size = 1usize << n;
    let mut rng = crate::rng::stream(seed, 0);
    let zeta: Vec<u64> = (0..size)
        .map(|y| {
            let r = rows[y];
            if r <= 0.0 {
                return 0;
            }
            let row = &t.values()[y * size..(y + 1) * size];
            let u = rng.random_range(0.0..r);
            let mut acc = 0.0;
            for (a, &v) in row.iter().enumerate() {
                acc += v;
                if u < acc {
                    return a as u64;
                }
            }
            // Rounding left u at the very top; take the last positive entry.
            row.iter().rposition(|&v| v > 0.0).unwrap_or(0) as u64
        })
        .collect();
    Ok(ZetaSample { l_value: l_value(t, &zeta, delta), zeta })
}

/// L(ζ) by the exact double loop over (y₁, y₂).
pub fn l_value(t: &CharTable, zeta: &[u64], delta: f64) -> f64 {
    let size = zeta.len();
    let heavy: Vec<bool> = (0..size).map(|y| t.get(y as u64, zeta[y]) >= delta).collect();
    let mut hits = 0u64;
    for y1 in 0..size {
        if !heavy[y1] {
            continue;
        }
        for y2 in 0..size {
            let y3 = y1 ^ y2;
            if heavy[y2] && heavy[y3] && zeta[y1] ^ zeta[y2] == zeta[y3] {
                hits += 1;
            }
        }
    }
    hits as f64 / (size * size) as f64
}

/// (1/27)((1/N) Σ f³ − 3δ) − 2/N, the averaged lower bound on L(ζ) with the
/// non-distinct pair term taken as 2/N.
pub fn l_lower_bound(t: &CharTable, delta: f64) -> f64 {
    (t.cube_sum() - 3.0 * delta) / 27.0 - 2.0 / t.big_n()
}
