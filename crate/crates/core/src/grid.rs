//! Landscapes sampled on an evenly spaced grid.
//!
//! A grid with nodes `a, a + delta, ..., a + m * delta` is refined to the
//! half-step lattice of `2m + 1` columns, column `c` sitting at
//! `a + c * delta / 2`. Values are stored in units of `delta / 2`, so every
//! layer of a grid barcode's landscape is integer valued with slopes of
//! `0` or `+-1` per column.

use crate::algebra::LandscapeCombination;
use crate::barcode::{GridBarcode, GridSpec};
use crate::landscape::{CriticalPoint, Layer, Layered};
use crate::metrics::{piece_integral, CompensatedSum, Norm};
use crate::{par, Error, Result};

/// The matrix `V[k][c]` of layer values on the lattice columns.
#[derive(Clone, Debug, PartialEq)]
pub struct GridLandscape {
    spec: GridSpec,
    rows: Vec<Vec<f64>>,
    degree: usize,
}

impl GridLandscape {
    /// Builds from rows given in rescaled units; every row needs `2m + 1`
    /// entries.
    pub fn from_rescaled_rows(spec: GridSpec, rows: Vec<Vec<f64>>, degree: usize) -> Result<Self> {
        let width = 2 * spec.count() + 1;
        if let Some((k, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(Error::InvalidGrid(format!(
                "row {} has {} columns, expected {width}",
                k + 1,
                row.len()
            )));
        }
        if rows.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::NotANumber);
        }
        Ok(GridLandscape { spec, rows, degree })
    }

    pub fn empty(spec: GridSpec, degree: usize) -> Self {
        GridLandscape {
            spec,
            rows: Vec::new(),
            degree,
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `K`, the number of rows.
    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    /// Number of lattice columns, `2m + 1`.
    pub fn width(&self) -> usize {
        2 * self.spec.count() + 1
    }

    /// Rows in rescaled units (multiples of `delta / 2`).
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn unit(&self) -> f64 {
        self.spec.spacing() / 2.0
    }

    /// `lambda_k` at lattice column `c`, in original units.
    pub fn value(&self, k: usize, column: usize) -> f64 {
        match k.checked_sub(1).and_then(|i| self.rows.get(i)) {
            Some(row) => row[column] * self.unit(),
            None => 0.0,
        }
    }

    pub fn is_finite_valued(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_finite())
    }

    /// Converts to a piecewise-linear combination on the whole real line.
    /// Every row must vanish at both ends of the grid, otherwise the
    /// extension by zero would be discontinuous.
    pub fn to_combination(&self) -> Result<LandscapeCombination> {
        let unit = self.unit();
        let last = self.width() - 1;
        let mut layers = Vec::with_capacity(self.rows.len());
        for (k, row) in self.rows.iter().enumerate() {
            if !row.iter().all(|v| v.is_finite()) {
                return Err(Error::InfiniteLayer { layer: k + 1 });
            }
            if row[0] != 0.0 || row[last] != 0.0 {
                return Err(Error::InvalidGrid(format!(
                    "row {} does not vanish at the grid boundary",
                    k + 1
                )));
            }
            let mut points = Vec::with_capacity(row.len() + 2);
            points.push(CriticalPoint::new(f64::NEG_INFINITY, 0.0));
            points.extend(
                row.iter()
                    .enumerate()
                    .map(|(c, &v)| CriticalPoint::new(self.spec.lattice_point(c), v * unit)),
            );
            points.push(CriticalPoint::new(f64::INFINITY, 0.0));
            layers.push(Layer::pruned(points));
        }
        Ok(LandscapeCombination::new(layers, self.degree))
    }
}

/// The grid landscape of a grid barcode.
///
/// Each pair `(b, d)` in rescaled units deposits the rising values
/// `1..=(d-b)/2` at columns `b+1..` and the falling values at columns
/// `..d-1`; sorting each column in decreasing order and reading the `k`-th
/// entry gives `lambda_k` at that column.
pub fn build_grid_landscape(barcode: &GridBarcode) -> GridLandscape {
    let spec = barcode.spec;
    let width = 2 * spec.count() + 1;
    let mut columns: Vec<Vec<u32>> = vec![Vec::new(); width];
    for (b, d) in barcode.rescaled_pairs() {
        let half = (d - b) / 2;
        for j in 1..=half {
            columns[b + j].push(j as u32);
        }
        for j in 1..half {
            columns[d - j].push(j as u32);
        }
    }
    par::for_each_mut(&mut columns, |column| {
        column.sort_unstable_by(|a, b| b.cmp(a))
    });
    let depth = columns.iter().map(Vec::len).max().unwrap_or(0);
    let rows = (0..depth)
        .map(|k| {
            columns
                .iter()
                .map(|column| column.get(k).map_or(0.0, |&v| f64::from(v)))
                .collect()
        })
        .collect();
    GridLandscape {
        spec,
        rows,
        degree: barcode.degree,
    }
}

/// Linear interpolation of row `k` at `x`, in original units.
pub fn evaluate_grid(grid: &GridLandscape, k: usize, x: f64) -> Result<f64> {
    let spec = grid.spec;
    if !spec.contains(x) {
        return Err(Error::OutsideGrid {
            value: x,
            begin: spec.begin(),
            end: spec.end(),
        });
    }
    let Some(row) = k.checked_sub(1).and_then(|i| grid.rows.get(i)) else {
        return Ok(0.0);
    };
    let unit = grid.unit();
    let t = (x - spec.begin()) / unit;
    let last = row.len() - 1;
    let c = (t.floor() as usize).min(last);
    if c == last {
        return Ok(row[last] * unit);
    }
    let frac = t - c as f64;
    let (v0, v1) = (row[c], row[c + 1]);
    Ok((v0 + (v1 - v0) * frac) * unit)
}

/// Samples every layer of a landscape at the lattice columns.
pub fn sample_exact_to_grid<L: Layered + ?Sized + Sync>(
    landscape: &L,
    spec: GridSpec,
) -> GridLandscape {
    let unit = spec.spacing() / 2.0;
    let width = 2 * spec.count() + 1;
    let rows = par::map(landscape.layers(), |layer| {
        let mut cursor = layer.cursor();
        (0..width)
            .map(|c| cursor.value_at(spec.lattice_point(c)) / unit)
            .collect()
    });
    GridLandscape {
        spec,
        rows,
        degree: landscape.degree(),
    }
}

/// `(delta / 2, K (m - 1) delta^2 / 4)`: bounds on the `L^inf` and `L^1`
/// error of a grid estimate with `K` layers.
pub fn grid_error_bounds(spec: GridSpec, depth: usize) -> (f64, f64) {
    let delta = spec.spacing();
    let m = spec.count() as f64;
    (delta / 2.0, depth as f64 * (m - 1.0) * delta * delta / 4.0)
}

fn check_specs(grids: &[&GridLandscape]) -> Result<GridSpec> {
    let first = grids.first().ok_or(Error::NoInput)?.spec;
    if grids.iter().any(|g| g.spec != first) {
        return Err(Error::GridMismatch);
    }
    Ok(first)
}

/// Entrywise `sum_j a_j V_j`, padding shorter inputs with zero rows.
pub fn grid_linear_combination(grids: &[&GridLandscape], coeffs: &[f64]) -> Result<GridLandscape> {
    if grids.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            expected: grids.len(),
            actual: coeffs.len(),
        });
    }
    combine(grids, |values| {
        values.iter().zip(coeffs).map(|(&v, &a)| a * v).sum()
    })
}

/// Entrywise mean. Summing first keeps the mean of identical integer
/// matrices exact.
pub fn grid_average(grids: &[&GridLandscape]) -> Result<GridLandscape> {
    let n = grids.len() as f64;
    combine(grids, |values| values.iter().sum::<f64>() / n)
}

fn combine(
    grids: &[&GridLandscape],
    f: impl Fn(&[f64]) -> f64 + Sync + Send,
) -> Result<GridLandscape> {
    let spec = check_specs(grids)?;
    let width = 2 * spec.count() + 1;
    let depth = grids.iter().map(|g| g.depth()).max().unwrap_or(0);
    let rows = par::map_range(depth, |k| {
        let mut values = vec![0.0; grids.len()];
        (0..width)
            .map(|c| {
                for (slot, g) in values.iter_mut().zip(grids) {
                    *slot = g.rows.get(k).map_or(0.0, |row| row[c]);
                }
                f(&values)
            })
            .collect()
    });
    Ok(GridLandscape {
        spec,
        rows,
        degree: grids[0].degree,
    })
}

/// Distance between the piecewise-linear interpolants of two grid
/// landscapes over the grid range.
pub fn grid_lp_distance(a: &GridLandscape, b: &GridLandscape, norm: Norm) -> Result<f64> {
    let spec = check_specs(&[a, b])?;
    for g in [a, b] {
        if let Some(k) = g.rows.iter().position(|r| r.iter().any(|v| !v.is_finite())) {
            return Err(Error::InfiniteLayer { layer: k + 1 });
        }
    }
    let unit = spec.spacing() / 2.0;
    let width = 2 * spec.count() + 1;
    let depth = a.depth().max(b.depth());
    let diff = |k: usize, c: usize| {
        let va = a.rows.get(k).map_or(0.0, |r| r[c]);
        let vb = b.rows.get(k).map_or(0.0, |r| r[c]);
        (va - vb) * unit
    };
    match norm.validate()? {
        Norm::Sup => {
            let per_row = par::map_range(depth, |k| {
                (0..width).map(|c| diff(k, c).abs()).fold(0.0, f64::max)
            });
            Ok(per_row.into_iter().fold(0.0, f64::max))
        }
        Norm::Lp(p) => {
            let per_row = par::map_range(depth, |k| {
                let mut acc = CompensatedSum::default();
                let mut prev = diff(k, 0);
                for c in 1..width {
                    let next = diff(k, c);
                    acc.add(piece_integral(unit, prev, next, p));
                    prev = next;
                }
                acc.total()
            });
            let total = per_row.into_iter().collect::<CompensatedSum>().total();
            Ok(total.powf(1.0 / p))
        }
    }
}
