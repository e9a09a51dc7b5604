//! Bounded-ratio protocol: a seeded ensemble of draws, each ratio evaluated
//! on the base lattice and on a 2x refined one.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::median;
use crate::report::{ConstantMode, NormReport, Verdict};

/// Fewest draws accepted.
pub const MIN_DRAWS: usize = 50;
/// PASS needs `max/median` below this.
pub const SPREAD_LIMIT: f64 = 10.0;
/// PASS needs the refined maximum within this relative distance.
pub const DRIFT_LIMIT: f64 = 0.3;

/// Seed of draw `i`.
pub fn draw_seed(base_seed: u64, i: usize) -> u64 {
    base_seed.wrapping_mul(1_000_003).wrapping_add(i as u64)
}

/// Evaluates `eval(seed, refine)` for `refine ∈ {1, 2}` on `draws` seeds in
/// parallel. Rows are `draw, seed, ratio, ratio_refined` in draw order.
pub fn ensemble_protocol(
    name: &str,
    draws: usize,
    base_seed: u64,
    eval: impl Fn(u64, usize) -> Result<f64> + Sync,
) -> Result<NormReport> {
    if draws < MIN_DRAWS {
        return Err(Error::param("draws", format!("{draws} < {MIN_DRAWS}")));
    }
    let rows = (0..draws)
        .into_par_iter()
        .map(|i| {
            let seed = draw_seed(base_seed, i);
            Ok((seed, eval(seed, 1)?, eval(seed, 2)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rep = NormReport::new(name, &["draw", "seed", "ratio", "ratio_refined"]);
    rep.param("draws", draws).param("base_seed", base_seed);
    rep.constant_mode = ConstantMode::Fitted;
    for (i, (seed, a, b)) in rows.iter().enumerate() {
        rep.push_row(vec![i as f64, *seed as f64, *a, *b]);
    }
    let base: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fine: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let max = base.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_fine = fine.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let med = median(&base);
    let drift = (max_fine - max).abs() / max;
    rep.fit("max", max);
    rep.fit("median", med);
    rep.fit("max_refined", max_fine);
    rep.verdict(Verdict::below("max_over_median", max / med, SPREAD_LIMIT));
    rep.verdict(Verdict::below("refinement_drift", drift, DRIFT_LIMIT));
    Ok(rep)
}
