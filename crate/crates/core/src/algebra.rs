//! Linear combinations and averages of landscapes.
//!
//! A linear combination of landscapes is again a stack of piecewise-linear
//! layers, so it shares the [`Layer`] representation. Combining layers
//! means merging their critical numbers and summing interpolated values at
//! every merged number.

use itertools::Itertools;

use crate::landscape::{interpolate, CriticalPoint, ExactLandscape, Layer, Layered};
use crate::{par, Error, Result};

/// A linear combination of landscapes. Unlike a landscape, values may be
/// negative and layers need not be nested.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LandscapeCombination {
    layers: Vec<Layer>,
    degree: usize,
    coefficients: Option<Vec<f64>>,
}

impl LandscapeCombination {
    pub fn new(layers: Vec<Layer>, degree: usize) -> Self {
        LandscapeCombination {
            layers,
            degree,
            coefficients: None,
        }
    }

    /// The zero function with `depth` (zero) layers.
    pub fn zero(depth: usize, degree: usize) -> Self {
        Self::new(vec![Layer::zero(); depth], degree)
    }

    /// Coefficients of the inputs this combination was formed from, if known.
    pub fn coefficients(&self) -> Option<&[f64]> {
        self.coefficients.as_deref()
    }

    pub fn with_coefficients(mut self, coefficients: Vec<f64>) -> Self {
        self.coefficients = Some(coefficients);
        self
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    /// `factor * self`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        ensure_finite(self)?;
        Ok(LandscapeCombination {
            layers: par::map(&self.layers, |l| l.map_values(|y| factor * y)),
            degree: self.degree,
            coefficients: self
                .coefficients
                .as_ref()
                .map(|c| c.iter().map(|a| factor * a).collect()),
        })
    }
}

impl Layered for LandscapeCombination {
    fn layers(&self) -> &[Layer] {
        &self.layers
    }

    fn degree(&self) -> usize {
        self.degree
    }
}

impl From<ExactLandscape> for LandscapeCombination {
    fn from(landscape: ExactLandscape) -> Self {
        let degree = landscape.degree();
        LandscapeCombination::new(landscape.into_layers(), degree)
    }
}

/// Options shared by the combination routines.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CombineOptions {
    /// Merged critical numbers closer than this to the previously kept one
    /// are dropped. Zero (the default) keeps every distinct number.
    pub epsilon_merge: f64,
}

pub(crate) fn ensure_finite<L: Layered + ?Sized>(item: &L) -> Result<()> {
    match item.layers().iter().position(|l| !l.is_finite_valued()) {
        Some(i) => Err(Error::InfiniteLayer { layer: i + 1 }),
        None => Ok(()),
    }
}

/// Sorted union of strictly increasing sequences, without duplicates.
pub fn merge_critical_numbers(lists: &[&[f64]]) -> Vec<f64> {
    merge_sorted(lists.iter().map(|l| l.iter().copied()))
}

fn merge_sorted<I>(lists: impl IntoIterator<Item = I>) -> Vec<f64>
where
    I: IntoIterator<Item = f64>,
{
    lists.into_iter().kmerge_by(|a, b| a < b).dedup().collect()
}

fn coalesce(points: Vec<CriticalPoint>, eps: f64) -> Vec<CriticalPoint> {
    if eps <= 0.0 {
        return points;
    }
    let last = points.len() - 1;
    let mut out: Vec<CriticalPoint> = Vec::with_capacity(points.len());
    for (i, p) in points.into_iter().enumerate() {
        match out.last() {
            Some(q) if i != last && p.x - q.x <= eps => {}
            _ => out.push(p),
        }
    }
    out
}

/// Walks the union of the critical numbers of two layers, calling `f(x,
/// a(x), b(x))` at each merged number in increasing order.
pub(crate) fn walk_merged(a: &Layer, b: &Layer, mut f: impl FnMut(f64, f64, f64)) {
    let (a, b) = (a.points(), b.points());
    let (mut i, mut j) = (0, 0);
    // Both layers start at -inf and end at +inf, so they run out together.
    while i < a.len() && j < b.len() {
        let x = a[i].x.min(b[j].x);
        let va = if a[i].x == x {
            i += 1;
            a[i - 1].y
        } else {
            interpolate(a[i - 1], a[i], x)
        };
        let vb = if b[j].x == x {
            j += 1;
            b[j - 1].y
        } else {
            interpolate(b[j - 1], b[j], x)
        };
        f(x, va, vb);
    }
}

fn combine_layers(a: &Layer, b: &Layer, eps: f64, value: impl Fn(f64, f64) -> f64) -> Layer {
    let mut points = Vec::with_capacity(a.points().len() + b.points().len());
    walk_merged(a, b, |x, va, vb| {
        points.push(CriticalPoint::new(x, value(va, vb)))
    });
    Layer::pruned(coalesce(points, eps))
}

fn combine_stacks(
    a: &[Layer],
    b: &[Layer],
    eps: f64,
    value: impl Fn(f64, f64) -> f64 + Sync + Send,
) -> Vec<Layer> {
    let zero = Layer::zero();
    let depth = a.len().max(b.len());
    par::map_range(depth, |k| {
        combine_layers(
            a.get(k).unwrap_or(&zero),
            b.get(k).unwrap_or(&zero),
            eps,
            &value,
        )
    })
}

fn check_inputs<L: Layered>(items: &[L], coeffs: Option<&[f64]>) -> Result<()> {
    if items.is_empty() {
        return Err(Error::NoInput);
    }
    if let Some(c) = coeffs {
        if c.len() != items.len() {
            return Err(Error::LengthMismatch {
                expected: items.len(),
                actual: c.len(),
            });
        }
    }
    items.iter().try_for_each(|item| ensure_finite(item))
}

/// `sum_j coeffs[j] * items[j]`, layer by layer: merge the critical numbers
/// of all inputs, interpolate every input at the merged numbers and add.
pub fn linear_combination<L: Layered + Sync>(
    items: &[L],
    coeffs: &[f64],
) -> Result<LandscapeCombination> {
    linear_combination_with(items, coeffs, &CombineOptions::default())
}

pub fn linear_combination_with<L: Layered + Sync>(
    items: &[L],
    coeffs: &[f64],
    options: &CombineOptions,
) -> Result<LandscapeCombination> {
    check_inputs(items, Some(coeffs))?;
    let depth = items.iter().map(Layered::depth).max().unwrap_or(0);
    let layers = par::map_range(depth, |k| {
        let inputs: Vec<(&Layer, f64)> = items
            .iter()
            .zip(coeffs)
            .filter_map(|(item, &c)| item.layers().get(k).map(|l| (l, c)))
            .collect();
        let xs = merge_sorted(inputs.iter().map(|(l, _)| l.critical_numbers()));
        let mut values = vec![0.0; xs.len()];
        for (layer, c) in &inputs {
            let mut cursor = layer.cursor();
            for (v, &x) in values.iter_mut().zip(&xs) {
                *v += c * cursor.value_at(x);
            }
        }
        let points = xs
            .into_iter()
            .zip(values)
            .map(|(x, y)| CriticalPoint::new(x, y))
            .collect();
        Layer::pruned(coalesce(points, options.epsilon_merge))
    });
    Ok(LandscapeCombination {
        layers,
        degree: items[0].degree(),
        coefficients: Some(coeffs.to_vec()),
    })
}

/// `sum_j coeffs[j] * items[j]`, merged pairwise in a binary tree. The
/// weights are applied at the first level; later levels add.
pub fn weighted_sum<L: Layered + Sync>(
    items: &[L],
    coeffs: &[f64],
) -> Result<LandscapeCombination> {
    weighted_sum_with(items, coeffs, &CombineOptions::default())
}

pub fn weighted_sum_with<L: Layered + Sync>(
    items: &[L],
    coeffs: &[f64],
    options: &CombineOptions,
) -> Result<LandscapeCombination> {
    check_inputs(items, Some(coeffs))?;
    let eps = options.epsilon_merge;
    let mut level: Vec<Vec<Layer>> = par::map_range(items.len().div_ceil(2), |i| {
        let (a, ca) = (items[2 * i].layers(), coeffs[2 * i]);
        match items.get(2 * i + 1) {
            Some(b) => {
                let cb = coeffs[2 * i + 1];
                combine_stacks(a, b.layers(), eps, move |x, y| ca * x + cb * y)
            }
            None => a.iter().map(|l| l.map_values(|y| ca * y)).collect(),
        }
    });
    while level.len() > 1 {
        level = reduce_level(level, |a, b| combine_stacks(&a, &b, eps, |x, y| x + y));
    }
    Ok(LandscapeCombination {
        layers: level.pop().unwrap_or_default(),
        degree: items[0].degree(),
        coefficients: Some(coeffs.to_vec()),
    })
}

fn reduce_level<T: Send>(level: Vec<T>, merge: impl Fn(T, T) -> T + Sync + Send) -> Vec<T> {
    let mut pairs = Vec::with_capacity(level.len().div_ceil(2));
    let mut it = level.into_iter();
    while let Some(a) = it.next() {
        pairs.push((a, it.next()));
    }
    par::into_map(pairs, |(a, b)| match b {
        Some(b) => merge(a, b),
        None => a,
    })
}

/// Pointwise mean of the inputs, merged in a binary tree.
///
/// Each tree node holds the mean of the leaves below it together with their
/// count, and two nodes are merged as `m_a + (m_b - m_a) * c_b / (c_a +
/// c_b)`. The result equals `sum_j items[j] / N` as a function; the
/// count-weighted merge makes the mean of identical inputs reproduce the
/// input exactly.
pub fn average<L: Layered + Sync>(items: &[L]) -> Result<LandscapeCombination> {
    average_with(items, &CombineOptions::default())
}

pub fn average_with<L: Layered + Sync>(
    items: &[L],
    options: &CombineOptions,
) -> Result<LandscapeCombination> {
    check_inputs(items, None)?;
    let eps = options.epsilon_merge;
    let mut level: Vec<(Vec<Layer>, usize)> =
        items.iter().map(|l| (l.layers().to_vec(), 1)).collect();
    while level.len() > 1 {
        level = reduce_level(level, |(a, ca), (b, cb)| {
            let w = cb as f64 / (ca + cb) as f64;
            (
                combine_stacks(&a, &b, eps, move |x, y| x + (y - x) * w),
                ca + cb,
            )
        });
    }
    let n = items.len();
    let (layers, _) = level.pop().expect("non-empty");
    Ok(LandscapeCombination {
        layers,
        degree: items[0].degree(),
        coefficients: Some(vec![1.0 / n as f64; n]),
    })
}
