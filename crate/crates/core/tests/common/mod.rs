//! Test oracles that do not share code with the library.
#![allow(dead_code)]

use landscape_toolbox::barcode::Barcode;

/// All tent values `max(0, min(x - b, d - x))` at `x`, largest first.
pub fn tent_values(barcode: &Barcode, x: f64) -> Vec<f64> {
    let mut values: Vec<f64> = barcode
        .pairs
        .iter()
        .map(|p| (x - p.birth()).min(p.death() - x).max(0.0))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// `lambda_k(x)` straight from the definition (`k >= 1`).
pub fn kth_largest(barcode: &Barcode, k: usize, x: f64) -> f64 {
    tent_values(barcode, x).get(k - 1).copied().unwrap_or(0.0)
}

/// Layer values of `sum_j a_j lambda^j` at `x`, for layers `1..=depth`.
pub fn combination_values(barcodes: &[Barcode], coeffs: &[f64], depth: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; depth];
    for (b, &a) in barcodes.iter().zip(coeffs) {
        for (k, v) in tent_values(b, x).into_iter().take(depth).enumerate() {
            out[k] += a * v;
        }
    }
    out
}

fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson_step(f, a, fa, m, fm);
    let (rm, frm, right) = simpson_step(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, fa, m, fm, lm, flm, left, eps / 2.0, depth - 1)
        + adaptive(f, m, fm, b, fb, rm, frm, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson_step(&f, a, fa, b, fb);
    adaptive(&f, a, fa, b, fb, m, fm, whole, eps, 48)
}

/// Quadrature over consecutive breakpoints, so that no kink of the
/// integrand hides between Simpson nodes at the coarsest level.
pub fn integrate_piecewise(f: impl Fn(f64) -> f64, mut breaks: Vec<f64>, eps: f64) -> f64 {
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let pieces = breaks.len().saturating_sub(1).max(1);
    breaks
        .windows(2)
        .map(|w| adaptive_simpson(&f, w[0], w[1], eps / pieces as f64))
        .sum()
}

/// Endpoints of every pair and every point where a rising edge can meet a
/// falling one of the same barcode, so each layer is linear between
/// consecutive breaks.
pub fn tent_breaks(barcodes: &[Barcode]) -> Vec<f64> {
    let mut breaks = Vec::new();
    for b in barcodes {
        for p in &b.pairs {
            breaks.extend([p.birth(), p.death()]);
            for q in &b.pairs {
                breaks.push(p.birth() + (q.death() - p.birth()) / 2.0);
            }
        }
    }
    breaks
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Kolmogorov-Smirnov distance between a sample and the uniform law on
/// `[0, 1]`.
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let below = i as f64 / n;
            let upto = (i + 1) as f64 / n;
            (x - below).abs().max((upto - x).abs())
        })
        .fold(0.0, f64::max)
}
