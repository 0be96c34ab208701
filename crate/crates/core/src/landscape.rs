//! Exact persistence landscapes.
//!
//! A landscape is a sequence of piecewise-linear layers
//! `lambda_1 >= lambda_2 >= ...`. Each layer is stored as its list of critical points, sorted by
//! `x`, with explicit sentinel points at `x = -inf` and `x = +inf`; the layer
//! is recovered by linear interpolation between consecutive points.

use crate::barcode::{canonical_sort, Barcode, BirthDeathPair};

const INF: f64 = f64::INFINITY;
const NEG_INF: f64 = f64::NEG_INFINITY;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint {
    pub x: f64,
    pub y: f64,
}

impl CriticalPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        CriticalPoint { x, y }
    }
}

impl From<(f64, f64)> for CriticalPoint {
    fn from((x, y): (f64, f64)) -> Self {
        CriticalPoint { x, y }
    }
}

/// Value at `x` of the line through two consecutive critical points, with
/// `a.x < x < b.x`. Points at infinite `x` extend the layer to infinity:
/// with a finite value the layer is constant there, with an infinite value
/// it has slope `+-1` (infinite intervals).
#[inline]
pub(crate) fn interpolate(a: CriticalPoint, b: CriticalPoint, x: f64) -> f64 {
    if a.x == NEG_INF {
        if a.y == INF {
            return if b.x == INF { INF } else { b.y + (b.x - x) };
        }
        return a.y;
    }
    if b.x == INF {
        return if b.y == INF { a.y + (x - a.x) } else { b.y };
    }
    a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)
}

fn collinear(a: CriticalPoint, b: CriticalPoint, c: CriticalPoint) -> bool {
    let finite = |p: CriticalPoint| p.x.is_finite() && p.y.is_finite();
    if finite(a) && finite(b) && finite(c) {
        return (b.y - a.y) * (c.x - b.x) == (c.y - b.y) * (b.x - a.x);
    }
    if !(finite(b)) {
        return false;
    }
    if a.x == NEG_INF && a.y == INF && finite(c) {
        return c.y - b.y == -(c.x - b.x);
    }
    if c.x == INF && c.y == INF && finite(a) {
        return b.y - a.y == b.x - a.x;
    }
    // A constant extension to infinity.
    a.y.is_finite() && c.y.is_finite() && a.y == b.y && b.y == c.y
}

/// One piecewise-linear layer, stored as its critical points.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    points: Vec<CriticalPoint>,
}

impl Layer {
    /// The zero function.
    pub fn zero() -> Self {
        Layer {
            points: vec![
                CriticalPoint::new(NEG_INF, 0.0),
                CriticalPoint::new(INF, 0.0),
            ],
        }
    }

    /// Builds a layer from critical points sorted strictly by `x`. Missing
    /// sentinels at `-inf` and `+inf` are added with value 0.
    pub fn from_points(points: Vec<CriticalPoint>) -> crate::Result<Self> {
        for (i, w) in points.windows(2).enumerate() {
            if w[0].x.partial_cmp(&w[1].x) != Some(std::cmp::Ordering::Less) {
                return Err(crate::Error::Format(format!(
                    "critical numbers must increase strictly (point {} at x = {} follows x = {})",
                    i + 2,
                    w[1].x,
                    w[0].x
                )));
            }
        }
        if points.iter().any(|p| p.x.is_nan() || p.y.is_nan()) {
            return Err(crate::Error::NotANumber);
        }
        let mut full = Vec::with_capacity(points.len() + 2);
        if points.first().is_none_or(|p| p.x != NEG_INF) {
            full.push(CriticalPoint::new(NEG_INF, 0.0));
        }
        full.extend(points);
        if full.last().is_none_or(|p| p.x != INF) {
            full.push(CriticalPoint::new(INF, 0.0));
        }
        Ok(Layer { points: full })
    }

    /// Drops repeated and collinear points. The input must already be sorted
    /// by `x` and carry both sentinels.
    pub(crate) fn pruned(points: Vec<CriticalPoint>) -> Self {
        let mut out: Vec<CriticalPoint> = Vec::with_capacity(points.len());
        for p in points {
            if let Some(last) = out.last() {
                if last.x == p.x {
                    debug_assert!(last.y == p.y, "jump at x = {}: {} vs {}", p.x, last.y, p.y);
                    continue;
                }
            }
            while out.len() >= 2 && collinear(out[out.len() - 2], out[out.len() - 1], p) {
                out.pop();
            }
            out.push(p);
        }
        debug_assert!(out.first().is_some_and(|p| p.x == NEG_INF));
        debug_assert!(out.last().is_some_and(|p| p.x == INF));
        Layer { points: out }
    }

    pub fn points(&self) -> &[CriticalPoint] {
        &self.points
    }

    /// Critical points strictly between the sentinels.
    pub fn interior(&self) -> &[CriticalPoint] {
        let start = usize::from(self.points.first().is_some_and(|p| p.x == NEG_INF));
        let end = self.points.len() - usize::from(self.points.last().is_some_and(|p| p.x == INF));
        &self.points[start..end.max(start)]
    }

    pub fn interior_count(&self) -> usize {
        self.interior().len()
    }

    pub fn critical_numbers(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.x)
    }

    pub fn is_finite_valued(&self) -> bool {
        self.points.iter().all(|p| p.y.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.points.iter().all(|p| p.y == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.y.abs()))
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let pts = &self.points;
        let j = pts.partition_point(|p| p.x < x);
        if j < pts.len() && pts[j].x == x {
            return pts[j].y;
        }
        if j == 0 || j == pts.len() {
            return 0.0;
        }
        interpolate(pts[j - 1], pts[j], x)
    }

    pub(crate) fn cursor(&self) -> Cursor<'_> {
        Cursor {
            points: &self.points,
            next: 0,
        }
    }

    pub(crate) fn map_values(&self, f: impl Fn(f64) -> f64) -> Layer {
        let points = self
            .points
            .iter()
            .map(|p| CriticalPoint::new(p.x, f(p.y)))
            .collect();
        Layer::pruned(points)
    }
}

/// Evaluates a layer at a nondecreasing sequence of positions in amortised
/// constant time per query.
pub(crate) struct Cursor<'a> {
    points: &'a [CriticalPoint],
    next: usize,
}

impl Cursor<'_> {
    pub(crate) fn value_at(&mut self, x: f64) -> f64 {
        let pts = self.points;
        while self.next < pts.len() && pts[self.next].x < x {
            self.next += 1;
        }
        if self.next < pts.len() && pts[self.next].x == x {
            return pts[self.next].y;
        }
        if self.next == 0 || self.next == pts.len() {
            return 0.0;
        }
        interpolate(pts[self.next - 1], pts[self.next], x)
    }
}

/// Anything represented as a stack of piecewise-linear layers: landscapes and
/// their linear combinations.
pub trait Layered {
    fn layers(&self) -> &[Layer];

    fn degree(&self) -> usize;

    /// Number of stored layers, `K`.
    fn depth(&self) -> usize {
        self.layers().len()
    }

    /// `lambda_k(x)` for `k >= 1`; zero when `k` exceeds the depth.
    fn evaluate(&self, k: usize, x: f64) -> f64 {
        match k.checked_sub(1).and_then(|i| self.layers().get(i)) {
            Some(layer) => layer.evaluate(x),
            None => 0.0,
        }
    }

    /// Total number of critical points, not counting the sentinels.
    fn critical_count(&self) -> usize {
        self.layers().iter().map(Layer::interior_count).sum()
    }

    fn is_finite_valued(&self) -> bool {
        self.layers().iter().all(Layer::is_finite_valued)
    }
}

impl<T: Layered + ?Sized> Layered for &T {
    fn layers(&self) -> &[Layer] {
        (**self).layers()
    }

    fn degree(&self) -> usize {
        (**self).degree()
    }
}

/// The persistence landscape of a barcode.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExactLandscape {
    layers: Vec<Layer>,
    degree: usize,
}

impl ExactLandscape {
    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }
}

impl Layered for ExactLandscape {
    fn layers(&self) -> &[Layer] {
        &self.layers
    }

    fn degree(&self) -> usize {
        self.degree
    }
}

/// The tent function of a pair, extended to infinite endpoints.
pub fn triangle_eval(pair: &BirthDeathPair, x: f64) -> f64 {
    let (b, d) = (pair.birth(), pair.death());
    if b == NEG_INF && d == INF {
        return INF;
    }
    if x <= b || x >= d {
        return 0.0;
    }
    (x - b).min(d - x)
}

#[inline]
fn peak(b: f64, d: f64) -> CriticalPoint {
    let half = (d - b) / 2.0;
    CriticalPoint::new(b + half, half)
}

/// Builds the exact landscape with a single sorted sweep per layer.
///
/// Pairs are sorted by increasing birth and decreasing death. Each pass walks
/// the remaining pairs once, tracing the upper envelope: whenever a later
/// pair crosses the current one, the crossing becomes a critical point and
/// the overlap `(b', d)` is pushed back for the next layer. Pairs with
/// infinite endpoints are supported.
pub fn build_landscape(barcode: &Barcode) -> ExactLandscape {
    let mut remaining: Vec<(f64, f64)> = canonical_sort(barcode)
        .pairs
        .iter()
        .map(|p| (p.birth(), p.death()))
        .collect();
    let mut layers = Vec::new();

    while !remaining.is_empty() {
        let mut next = Vec::with_capacity(remaining.len());
        let (b, mut d) = remaining[0];
        let mut points = Vec::new();
        let mut open = true;
        if b == NEG_INF && d == INF {
            points.push(CriticalPoint::new(NEG_INF, INF));
            points.push(CriticalPoint::new(INF, INF));
            open = false;
        } else if d == INF {
            points.push(CriticalPoint::new(NEG_INF, 0.0));
            points.push(CriticalPoint::new(b, 0.0));
            points.push(CriticalPoint::new(INF, INF));
            open = false;
        } else if b == NEG_INF {
            points.push(CriticalPoint::new(NEG_INF, INF));
        } else {
            points.push(CriticalPoint::new(NEG_INF, 0.0));
            points.push(CriticalPoint::new(b, 0.0));
            points.push(peak(b, d));
        }

        let mut i = 1;
        if open {
            while i < remaining.len() {
                let (bn, dn) = remaining[i];
                i += 1;
                if dn <= d {
                    next.push((bn, dn));
                    continue;
                }
                if bn < d {
                    points.push(peak(bn, d));
                    // Keep `next` in canonical order: pairs born at `bn` that
                    // die after `d` precede the pushed-back `(bn, d)`.
                    while i < remaining.len() && remaining[i].0 == bn && remaining[i].1 > d {
                        next.push(remaining[i]);
                        i += 1;
                    }
                    next.push((bn, d));
                } else {
                    if bn > d {
                        points.push(CriticalPoint::new(d, 0.0));
                    }
                    points.push(CriticalPoint::new(bn, 0.0));
                }
                if dn == INF {
                    points.push(CriticalPoint::new(INF, INF));
                    open = false;
                    break;
                }
                points.push(peak(bn, dn));
                d = dn;
            }
            if open {
                points.push(CriticalPoint::new(d, 0.0));
                points.push(CriticalPoint::new(INF, 0.0));
            }
        }
        next.extend_from_slice(&remaining[i..]);
        layers.push(Layer::pruned(points));
        remaining = next;
    }

    ExactLandscape {
        layers,
        degree: barcode.degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::pointwise_kmax_oracle;
    use proptest::prelude::*;

    fn pts(layer: &Layer) -> Vec<(f64, f64)> {
        layer.points().iter().map(|p| (p.x, p.y)).collect()
    }

    fn worked_example() -> Barcode {
        Barcode::from_finite(&[(1.0, 5.0), (2.0, 8.0), (3.0, 4.0), (5.0, 9.0), (6.0, 7.0)]).unwrap()
    }

    #[test]
    fn triangle_function_values() {
        let p = BirthDeathPair::new(1.0, 5.0).unwrap();
        assert_eq!(triangle_eval(&p, 3.0), 2.0);
        assert_eq!(triangle_eval(&p, 1.0), 0.0);
        assert_eq!(triangle_eval(&p, 6.0), 0.0);
        let p = BirthDeathPair::new(NEG_INF, 4.0).unwrap();
        assert_eq!(triangle_eval(&p, 1.0), 3.0);
        let p = BirthDeathPair::new(2.0, INF).unwrap();
        assert_eq!(triangle_eval(&p, 5.0), 3.0);
        let p = BirthDeathPair::new(NEG_INF, INF).unwrap();
        assert_eq!(triangle_eval(&p, 0.0), INF);
    }

    #[test]
    fn worked_example_layers() {
        let l = build_landscape(&worked_example());
        assert_eq!(l.depth(), 3);
        assert_eq!(
            pts(&l.layers()[0]),
            vec![
                (NEG_INF, 0.0),
                (1.0, 0.0),
                (3.0, 2.0),
                (3.5, 1.5),
                (5.0, 3.0),
                (6.5, 1.5),
                (7.0, 2.0),
                (9.0, 0.0),
                (INF, 0.0)
            ]
        );
        assert_eq!(
            pts(&l.layers()[1]),
            vec![
                (NEG_INF, 0.0),
                (2.0, 0.0),
                (3.5, 1.5),
                (5.0, 0.0),
                (6.5, 1.5),
                (8.0, 0.0),
                (INF, 0.0)
            ]
        );
        assert_eq!(
            pts(&l.layers()[2]),
            vec![
                (NEG_INF, 0.0),
                (3.0, 0.0),
                (3.5, 0.5),
                (4.0, 0.0),
                (6.0, 0.0),
                (6.5, 0.5),
                (7.0, 0.0),
                (INF, 0.0)
            ]
        );
        assert_eq!(l.critical_count(), 18);
    }

    #[test]
    fn single_triangle() {
        let l = build_landscape(&Barcode::from_finite(&[(0.0, 2.0)]).unwrap());
        assert_eq!(
            pts(&l.layers()[0]),
            vec![
                (NEG_INF, 0.0),
                (0.0, 0.0),
                (1.0, 1.0),
                (2.0, 0.0),
                (INF, 0.0)
            ]
        );
        assert_eq!(l.critical_count(), 3);
        assert_eq!(l.evaluate(1, 0.5), 0.5);
        assert_eq!(l.evaluate(2, 1.0), 0.0);
    }

    #[test]
    fn evaluation_examples() {
        let l = build_landscape(&worked_example());
        // Between (3.5, 1.5) and (5, 3) the slope is 1, so the value at 4 is 2.
        assert_eq!(l.evaluate(1, 4.0), 2.0);
        assert_eq!(pointwise_kmax_oracle(&worked_example(), 1, 4.0), 2.0);
        assert_eq!(l.evaluate(4, 5.0), 0.0);
        assert_eq!(l.evaluate(0, 5.0), 0.0);
        assert_eq!(l.evaluate(1, -1e300), 0.0);
        assert_eq!(l.evaluate(1, INF), 0.0);
    }

    #[test]
    fn empty_barcode_has_no_layers() {
        let l = build_landscape(&Barcode::default());
        assert_eq!(l.depth(), 0);
        assert_eq!(l.critical_count(), 0);
        assert_eq!(l.evaluate(1, 0.0), 0.0);
    }

    #[test]
    fn infinite_death_layer() {
        let b = Barcode::new(vec![BirthDeathPair::new(1.0, INF).unwrap()]);
        let l = build_landscape(&b);
        assert_eq!(
            pts(&l.layers()[0]),
            vec![(NEG_INF, 0.0), (1.0, 0.0), (INF, INF)]
        );
        assert_eq!(l.evaluate(1, 4.0), 3.0);
        assert_eq!(l.evaluate(1, 0.5), 0.0);
        assert!(!l.is_finite_valued());
    }

    #[test]
    fn infinite_birth_and_mixed_layers() {
        let b = Barcode::new(vec![
            BirthDeathPair::new(NEG_INF, 4.0).unwrap(),
            BirthDeathPair::new(2.0, 10.0).unwrap(),
            BirthDeathPair::new(NEG_INF, INF).unwrap(),
            BirthDeathPair::new(6.0, INF).unwrap(),
        ]);
        let l = build_landscape(&b);
        assert_eq!(pts(&l.layers()[0]), vec![(NEG_INF, INF), (INF, INF)]);
        assert_eq!(
            pts(&l.layers()[1]),
            vec![
                (NEG_INF, INF),
                (3.0, 1.0),
                (6.0, 4.0),
                (8.0, 2.0),
                (INF, INF)
            ]
        );
        for x in [-5.0, 0.0, 2.5, 3.0, 3.7, 5.0, 6.5, 8.0, 12.0] {
            for k in 1..=5 {
                assert_eq!(
                    l.evaluate(k, x),
                    pointwise_kmax_oracle(&b, k, x),
                    "k={k} x={x}"
                );
            }
        }
    }

    #[test]
    fn duplicates_give_identical_layers() {
        let b = Barcode::from_finite(&[(0.0, 2.0), (0.0, 2.0), (0.0, 2.0)]).unwrap();
        let l = build_landscape(&b);
        assert_eq!(l.depth(), 3);
        assert_eq!(l.layers()[0], l.layers()[1]);
        assert_eq!(l.layers()[1], l.layers()[2]);
    }

    #[test]
    fn touching_intervals_share_a_layer() {
        let b = Barcode::from_finite(&[(1.0, 2.0), (2.0, 3.0)]).unwrap();
        let l = build_landscape(&b);
        assert_eq!(l.depth(), 1);
        assert_eq!(
            pts(&l.layers()[0]),
            vec![
                (NEG_INF, 0.0),
                (1.0, 0.0),
                (1.5, 0.5),
                (2.0, 0.0),
                (2.5, 0.5),
                (3.0, 0.0),
                (INF, 0.0)
            ]
        );
    }

    #[test]
    fn nested_intervals_count() {
        // Both 3n + 2p = 8 and the actual count 6 are documented; the
        // formula assumes proper crossings.
        let b = Barcode::from_finite(&[(0.0, 6.0), (1.0, 5.0)]).unwrap();
        let l = build_landscape(&b);
        assert_eq!(l.critical_count(), 6);
        assert!(l.critical_count() <= 3 * b.len() + 2 * b.intersection_count());
    }

    #[test]
    fn staircase_counts() {
        for n in 1..=12usize {
            let pairs: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, (i + 2 * n) as f64)).collect();
            let l = build_landscape(&Barcode::from_finite(&pairs).unwrap());
            assert_eq!(l.depth(), n);
            for (k, layer) in l.layers().iter().enumerate() {
                assert_eq!(layer.interior_count(), 2 * n + 3 - 2 * (k + 1));
            }
            assert_eq!(l.critical_count(), n * n + 2 * n);
        }
    }

    #[test]
    fn layer_construction_validates_order() {
        assert!(Layer::from_points(vec![(1.0, 0.0).into(), (1.0, 1.0).into()]).is_err());
        assert!(Layer::from_points(vec![(2.0, 0.0).into(), (1.0, 1.0).into()]).is_err());
        let l = Layer::from_points(vec![
            (0.0, 0.0).into(),
            (1.0, 1.0).into(),
            (2.0, 0.0).into(),
        ])
        .unwrap();
        assert_eq!(l.points().len(), 5);
        assert_eq!(Layer::from_points(vec![]).unwrap(), Layer::zero());
    }

    #[test]
    fn pruning_removes_collinear_points() {
        let l = Layer::pruned(vec![
            (NEG_INF, 0.0).into(),
            (-1.0, 0.0).into(),
            (0.0, 0.0).into(),
            (1.0, 1.0).into(),
            (2.0, 2.0).into(),
            (2.0, 2.0).into(),
            (4.0, 0.0).into(),
            (INF, 0.0).into(),
        ]);
        assert_eq!(
            pts(&l),
            vec![
                (NEG_INF, 0.0),
                (0.0, 0.0),
                (2.0, 2.0),
                (4.0, 0.0),
                (INF, 0.0)
            ]
        );
    }

    fn arb_barcode() -> impl Strategy<Value = Barcode> {
        prop::collection::vec((0u32..40, 1u32..20), 0..25).prop_map(|v| {
            Barcode::from_finite(
                &v.into_iter()
                    .map(|(b, l)| (b as f64 * 0.5, (b + l) as f64 * 0.5))
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn matches_pointwise_definition(b in arb_barcode(), xs in prop::collection::vec(-1.0f64..32.0, 50)) {
            let l = build_landscape(&b);
            for &x in &xs {
                for k in 1..=l.depth() + 1 {
                    let got = l.evaluate(k, x);
                    let want = pointwise_kmax_oracle(&b, k, x);
                    prop_assert!((got - want).abs() <= 1e-12, "k={} x={} got={} want={}", k, x, got, want);
                }
            }
        }

        #[test]
        fn layers_are_nested_and_lipschitz(b in arb_barcode(), xs in prop::collection::vec(-1.0f64..32.0, 50)) {
            let l = build_landscape(&b);
            prop_assert!(l.depth() <= b.len());
            prop_assert_eq!(l.depth(), b.max_overlap());
            for &x in &xs {
                for k in 1..=l.depth() {
                    // Two layers meeting on a shared falling edge are interpolated
                    // from different end points, so allow rounding.
                    prop_assert!(l.evaluate(k, x) >= l.evaluate(k + 1, x) - 1e-12);
                }
            }
            for layer in l.layers() {
                for w in layer.interior().windows(2) {
                    let slope = (w[1].y - w[0].y) / (w[1].x - w[0].x);
                    prop_assert!((-1.0..=1.0).contains(&slope));
                }
            }
            let p = l.critical_count();
            let n = b.len();
            prop_assert!(p <= n * n + 2 * n);
            prop_assert!(p <= 3 * n + 2 * b.intersection_count());
        }
    }
}
