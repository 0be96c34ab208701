//! Direct evaluation of the landscape definition, used as an independent
//! check on the sweep construction.

use crate::barcode::Barcode;
use crate::landscape::triangle_eval;

/// The `k`-th largest tent-function value at `x`, or 0 if fewer than `k`
/// pairs are present. `O(n log n)` per query.
pub fn pointwise_kmax_oracle(barcode: &Barcode, k: usize, x: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let mut values: Vec<f64> = barcode.pairs.iter().map(|p| triangle_eval(p, x)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.get(k - 1).copied().unwrap_or(0.0)
}
