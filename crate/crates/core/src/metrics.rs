//! Norms, distances and inner products of landscapes.
//!
//! Everything here is exact up to floating point: each layer is linear
//! between consecutive critical numbers, so integrals are sums of closed-form
//! integrals over linear pieces and suprema are attained at critical points.

use std::fmt;

use crate::algebra::{ensure_finite, walk_merged};
use crate::landscape::{Layer, Layered};
use crate::{par, Error, Result};

/// Which function-space norm to use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Norm {
    /// `L^p` for a real `p >= 1`.
    Lp(f64),
    /// `L^inf`, the supremum norm.
    Sup,
}

impl Norm {
    /// Interprets the command-line convention: `p >= 1` selects `L^p`, and
    /// `p = -1` (or `+inf`) selects the supremum norm.
    pub fn from_exponent(p: f64) -> Result<Self> {
        if p == -1.0 || p == f64::INFINITY {
            Ok(Norm::Sup)
        } else if p >= 1.0 && p.is_finite() {
            Ok(Norm::Lp(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// The exponent in command-line convention (`-1` for the supremum norm).
    pub fn exponent(self) -> f64 {
        match self {
            Norm::Lp(p) => p,
            Norm::Sup => -1.0,
        }
    }

    pub(crate) fn validate(self) -> Result<Self> {
        match self {
            Norm::Lp(p) if !(p >= 1.0 && p.is_finite()) => Err(Error::InvalidExponent(p)),
            other => Ok(other),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Lp(p) => write!(f, "L^{p}"),
            Norm::Sup => f.write_str("L^inf"),
        }
    }
}

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[inline]
fn power(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else if p == 2.0 {
        v * v
    } else if p == 3.0 {
        v * v * v
    } else if p == 4.0 {
        (v * v) * (v * v)
    } else {
        v.powf(p)
    }
}

/// `int_0^h v(t)^p dt` for `v` linear from `a >= 0` to `b >= 0`.
#[inline]
fn same_sign_integral(h: f64, a: f64, b: f64, p: f64) -> f64 {
    if p == 1.0 {
        h * (a + b) / 2.0
    } else if p == 2.0 {
        h * (a * a + a * b + b * b) / 3.0
    } else if p == 3.0 {
        h * (a + b) * (a * a + b * b) / 4.0
    } else if p == 4.0 {
        let (a2, b2) = (a * a, b * b);
        h * (a2 * a2 + a2 * a * b + a2 * b2 + a * b * b2 + b2 * b2) / 5.0
    } else {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if hi == 0.0 {
            return 0.0;
        }
        // (hi^{p+1} - lo^{p+1}) / (hi - lo), rewritten around t = 1 - lo/hi
        // so that nearly constant pieces do not cancel.
        let t = (hi - lo) / hi;
        let ratio = if t == 0.0 {
            p + 1.0
        } else {
            -((p + 1.0) * (-t).ln_1p()).exp_m1() / t
        };
        h * hi.powf(p) * ratio / (p + 1.0)
    }
}

/// `int |l|^p` over a piece of width `h` where `l` is linear from `y0` to
/// `y1`; a sign change splits the piece at the zero crossing.
#[inline]
pub(crate) fn piece_integral(h: f64, y0: f64, y1: f64, p: f64) -> f64 {
    if (y0 < 0.0 && y1 > 0.0) || (y0 > 0.0 && y1 < 0.0) {
        let h0 = h * (y0 / (y0 - y1));
        let h1 = h - h0;
        (h0 * power(y0.abs(), p) + h1 * power(y1.abs(), p)) / (p + 1.0)
    } else {
        same_sign_integral(h, y0.abs(), y1.abs(), p)
    }
}

/// `int_{x0}^{x1} |l(x)|^p dx` for the line `l` through `(x0, y0)` and
/// `(x1, y1)`.
pub fn segment_lp_integral(x0: f64, y0: f64, x1: f64, y1: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if !(x0.is_finite() && x1.is_finite() && x0 < x1) {
        return Err(Error::InvalidSegment { x0, x1 });
    }
    if !(y0.is_finite() && y1.is_finite()) {
        return Err(Error::NotANumber);
    }
    Ok(piece_integral(x1 - x0, y0, y1, p))
}

/// Integral of `|f|^p` between consecutive sampled points `(x, f(x))`.
/// Pieces reaching to infinity contribute nothing when `f` vanishes there
/// and make the integral infinite otherwise.
struct PieceIntegrator {
    p: f64,
    last: Option<(f64, f64)>,
    acc: CompensatedSum,
}

impl PieceIntegrator {
    fn new(p: f64) -> Self {
        PieceIntegrator {
            p,
            last: None,
            acc: CompensatedSum::default(),
        }
    }

    #[inline]
    fn push(&mut self, x: f64, y: f64) {
        if let Some((x0, y0)) = self.last {
            if x0.is_finite() && x.is_finite() {
                self.acc.add(piece_integral(x - x0, y0, y, self.p));
            } else if y0 != 0.0 || y != 0.0 {
                self.acc.add(f64::INFINITY);
            }
        }
        self.last = Some((x, y));
    }

    fn total(self) -> f64 {
        self.acc.total()
    }
}

fn layer_integral(layer: &Layer, p: f64) -> f64 {
    let mut integrator = PieceIntegrator::new(p);
    for point in layer.points() {
        integrator.push(point.x, point.y);
    }
    integrator.total()
}

/// Largest `|value|` over all layers.
pub fn sup_norm<L: Layered + ?Sized>(f: &L) -> f64 {
    f.layers()
        .iter()
        .fold(0.0, |m, layer| m.max(layer.max_abs()))
}

/// `(sum_k int |f_k|^p)^(1/p)`, or the supremum norm.
pub fn lp_norm<L: Layered + ?Sized>(f: &L, norm: Norm) -> Result<f64> {
    ensure_finite(f)?;
    match norm.validate()? {
        Norm::Sup => Ok(sup_norm(f)),
        Norm::Lp(p) => {
            let per_layer = par::map(f.layers(), |layer| layer_integral(layer, p));
            let total = per_layer.into_iter().collect::<CompensatedSum>().total();
            Ok(total.powf(1.0 / p))
        }
    }
}

/// `||f - g||` without materialising the difference: the two layers are
/// walked together over their merged critical numbers.
pub fn lp_distance<A, B>(f: &A, g: &B, norm: Norm) -> Result<f64>
where
    A: Layered + ?Sized + Sync,
    B: Layered + ?Sized + Sync,
{
    ensure_finite(f)?;
    ensure_finite(g)?;
    let norm = norm.validate()?;
    let zero = Layer::zero();
    let depth = f.depth().max(g.depth());
    let layer_pair = |k: usize| {
        (
            f.layers().get(k).unwrap_or(&zero),
            g.layers().get(k).unwrap_or(&zero),
        )
    };
    match norm {
        Norm::Sup => {
            let per_layer = par::map_range(depth, |k| {
                let (a, b) = layer_pair(k);
                let mut m = 0.0f64;
                walk_merged(a, b, |_, va, vb| m = m.max((va - vb).abs()));
                m
            });
            Ok(per_layer.into_iter().fold(0.0, f64::max))
        }
        Norm::Lp(p) => {
            let per_layer = par::map_range(depth, |k| {
                let (a, b) = layer_pair(k);
                let mut integrator = PieceIntegrator::new(p);
                walk_merged(a, b, |x, va, vb| integrator.push(x, va - vb));
                integrator.total()
            });
            let total = per_layer.into_iter().collect::<CompensatedSum>().total();
            Ok(total.powf(1.0 / p))
        }
    }
}

/// `sum_k int f_k g_k`.
pub fn inner_product<A, B>(f: &A, g: &B) -> Result<f64>
where
    A: Layered + ?Sized + Sync,
    B: Layered + ?Sized + Sync,
{
    ensure_finite(f)?;
    ensure_finite(g)?;
    let depth = f.depth().min(g.depth());
    let per_layer = par::map_range(depth, |k| {
        let mut acc = CompensatedSum::default();
        let mut last: Option<(f64, f64, f64)> = None;
        walk_merged(&f.layers()[k], &g.layers()[k], |x, a1, b1| {
            if let Some((x0, a0, b0)) = last {
                if x0.is_finite() && x.is_finite() {
                    let h = x - x0;
                    acc.add(h * (2.0 * a0 * b0 + a0 * b1 + a1 * b0 + 2.0 * a1 * b1) / 6.0);
                } else if a0 * b0 != 0.0 || a1 * b1 != 0.0 {
                    acc.add(f64::INFINITY);
                }
            }
            last = Some((x, a1, b1));
        });
        acc.total()
    });
    Ok(per_layer.into_iter().collect::<CompensatedSum>().total())
}
