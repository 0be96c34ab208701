//! Persistence barcodes: multisets of birth-death pairs.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::format_general;
use crate::{Error, Result};

/// A real number or one of the two infinities. Never NaN.
///
/// Negative zero is normalised to positive zero so that the total order and
/// equality agree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const NEG_INFINITY: ExtendedReal = ExtendedReal(f64::NEG_INFINITY);
    pub const INFINITY: ExtendedReal = ExtendedReal(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::NotANumber);
        }
        Ok(ExtendedReal(if value == 0.0 { 0.0 } else { value }))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Eq for ExtendedReal {}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<f64> for ExtendedReal {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        ExtendedReal::new(value)
    }
}

impl From<ExtendedReal> for f64 {
    fn from(value: ExtendedReal) -> f64 {
        value.0
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// An interval `(birth, death)` with `birth < death`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BirthDeathPair {
    birth: ExtendedReal,
    death: ExtendedReal,
}

impl BirthDeathPair {
    pub fn new(birth: f64, death: f64) -> Result<Self> {
        let (b, d) = (ExtendedReal::new(birth)?, ExtendedReal::new(death)?);
        if b >= d {
            return Err(Error::InvalidPair {
                line: 0,
                birth,
                death,
            });
        }
        Ok(BirthDeathPair { birth: b, death: d })
    }

    pub fn birth(&self) -> f64 {
        self.birth.value()
    }

    pub fn death(&self) -> f64 {
        self.death.value()
    }

    pub fn is_finite(&self) -> bool {
        self.birth.is_finite() && self.death.is_finite()
    }

    pub fn length(&self) -> f64 {
        self.death() - self.birth()
    }

    /// True when the open intervals of `self` and `other` intersect.
    pub fn overlaps(&self, other: &BirthDeathPair) -> bool {
        self.birth.max(other.birth) < self.death.min(other.death)
    }
}

/// A multiset of birth-death pairs together with the homological degree they
/// came from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Barcode {
    pub pairs: Vec<BirthDeathPair>,
    pub degree: usize,
}

impl Barcode {
    pub fn new(pairs: Vec<BirthDeathPair>) -> Self {
        Barcode { pairs, degree: 0 }
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn from_finite(pairs: &[(f64, f64)]) -> Result<Self> {
        pairs
            .iter()
            .map(|&(b, d)| BirthDeathPair::new(b, d))
            .collect::<Result<Vec<_>>>()
            .map(Barcode::new)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.pairs.iter().all(BirthDeathPair::is_finite)
    }

    /// Number of unordered pairs of intervals whose interiors intersect.
    pub fn intersection_count(&self) -> usize {
        let mut sorted = self.pairs.clone();
        sorted.sort_by_key(|p| p.birth);
        // For each interval count the later-born intervals starting before it
        // dies.
        let births: Vec<ExtendedReal> = sorted.iter().map(|p| p.birth).collect();
        sorted
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let end = births.partition_point(|&b| b < p.death);
                end - (i + 1)
            })
            .sum()
    }

    /// Largest number of intervals containing a common point.
    pub fn max_overlap(&self) -> usize {
        let mut events: Vec<(ExtendedReal, i32)> = Vec::with_capacity(2 * self.len());
        for p in &self.pairs {
            events.push((p.birth, 1));
            events.push((p.death, -1));
        }
        // Deaths sort before births at equal positions: intervals are open.
        events.sort();
        let mut depth = 0i32;
        let mut best = 0i32;
        for (_, delta) in events {
            depth += delta;
            best = best.max(depth);
        }
        best as usize
    }
}

/// A non-fatal problem found while reading or transforming a barcode.
#[derive(Clone, Debug, PartialEq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParseOptions {
    /// Values whose magnitude equals this number are read as infinities.
    pub infinity: Option<f64>,
    /// Reject pairs with `death <= birth` instead of repairing them.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            infinity: None,
            strict: true,
        }
    }
}

impl ParseOptions {
    pub fn lenient() -> Self {
        ParseOptions {
            strict: false,
            ..Self::default()
        }
    }

    pub(crate) fn decode(&self, value: f64) -> f64 {
        match self.infinity {
            Some(magic) if value.abs() == magic => value.signum() * f64::INFINITY,
            _ => value,
        }
    }

    pub(crate) fn encode(&self, value: f64) -> String {
        match self.infinity {
            Some(magic) if value.is_infinite() => format_general(value.signum() * magic, 17),
            _ => format_general(value, 17),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

pub(crate) fn parse_number(token: &str, line: usize) -> Result<f64> {
    let value: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("not a number: {token:?}")))?;
    if value.is_nan() {
        return Err(Error::parse(line, "NaN is not allowed"));
    }
    Ok(value)
}

/// Reads a barcode in the "one `b d` pair per line" format.
pub fn parse_barcode(text: &str, options: &ParseOptions) -> Result<Parsed<Barcode>> {
    let mut pairs = Vec::new();
    let mut warnings = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected 2 numbers, found {}", tokens.len()),
            ));
        }
        let birth = options.decode(parse_number(tokens[0], line)?);
        let death = options.decode(parse_number(tokens[1], line)?);
        if birth < death {
            pairs.push(BirthDeathPair::new(birth, death)?);
        } else if options.strict {
            return Err(Error::InvalidPair { line, birth, death });
        } else if birth == death {
            warnings.push(Warning {
                line,
                message: format!("dropped degenerate pair ({birth}, {death})"),
            });
        } else {
            warnings.push(Warning {
                line,
                message: format!("reordered pair ({birth}, {death})"),
            });
            pairs.push(BirthDeathPair::new(death, birth)?);
        }
    }
    Ok(Parsed {
        value: Barcode::new(pairs),
        warnings,
    })
}

/// Writes a barcode in the format read by [`parse_barcode`].
pub fn write_barcode(barcode: &Barcode, options: &ParseOptions) -> String {
    let mut out = String::new();
    for p in &barcode.pairs {
        out.push_str(&options.encode(p.birth()));
        out.push(' ');
        out.push_str(&options.encode(p.death()));
        out.push('\n');
    }
    out
}

/// Sorts by increasing birth, ties by decreasing death.
pub fn canonical_sort(barcode: &Barcode) -> Barcode {
    let mut pairs = barcode.pairs.clone();
    pairs.sort_by(canonical_order);
    Barcode {
        pairs,
        degree: barcode.degree,
    }
}

pub(crate) fn canonical_order(a: &BirthDeathPair, b: &BirthDeathPair) -> Ordering {
    a.birth.cmp(&b.birth).then(b.death.cmp(&a.death))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfinitePolicy {
    /// Replace `+inf` deaths by the cutoff and `-inf` births by its negation.
    Truncate,
    /// Remove pairs with an infinite endpoint.
    Drop,
}

pub fn truncate_infinite(
    barcode: &Barcode,
    cutoff: f64,
    policy: InfinitePolicy,
) -> Result<Barcode> {
    if !cutoff.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cutoff must be finite, got {cutoff}"
        )));
    }
    let mut pairs = Vec::with_capacity(barcode.len());
    for p in &barcode.pairs {
        if p.is_finite() {
            pairs.push(*p);
            continue;
        }
        if policy == InfinitePolicy::Drop {
            continue;
        }
        let birth = if p.birth() == f64::NEG_INFINITY {
            -cutoff
        } else {
            p.birth()
        };
        let death = if p.death() == f64::INFINITY {
            cutoff
        } else {
            p.death()
        };
        if birth >= death {
            return Err(Error::Truncation {
                birth: p.birth(),
                death: p.death(),
                cutoff,
            });
        }
        pairs.push(BirthDeathPair::new(birth, death)?);
    }
    Ok(Barcode {
        pairs,
        degree: barcode.degree,
    })
}

/// An evenly spaced grid `begin, begin + spacing, ..., begin + count * spacing`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    begin: f64,
    spacing: f64,
    count: usize,
}

impl GridSpec {
    pub fn new(begin: f64, spacing: f64, count: usize) -> Result<Self> {
        if !begin.is_finite() {
            return Err(Error::InvalidGrid(format!("origin {begin} is not finite")));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "spacing {spacing} must be positive"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidGrid("node count must be at least 1".into()));
        }
        Ok(GridSpec {
            begin,
            spacing,
            count,
        })
    }

    pub fn begin(&self) -> f64 {
        self.begin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `m`: the grid has `m + 1` nodes.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> f64 {
        self.node(self.count)
    }

    pub fn node(&self, index: usize) -> f64 {
        self.begin + index as f64 * self.spacing
    }

    /// Position of column `c` of the half-step lattice `0..=2m`.
    pub fn lattice_point(&self, column: usize) -> f64 {
        self.begin + column as f64 * (self.spacing / 2.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.begin && x <= self.end()
    }

    /// Nearest node index; exact midpoints round up.
    pub fn nearest(&self, x: f64) -> Result<usize> {
        if !self.contains(x) {
            return Err(Error::OutsideGrid {
                value: x,
                begin: self.begin,
                end: self.end(),
            });
        }
        let t = (x - self.begin) / self.spacing;
        Ok(((t + 0.5).floor() as usize).min(self.count))
    }
}

/// Birth-death pairs whose endpoints are grid node indices.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBarcode {
    pub spec: GridSpec,
    pairs: Vec<(usize, usize)>,
    pub degree: usize,
}

impl GridBarcode {
    pub fn new(spec: GridSpec, pairs: Vec<(usize, usize)>) -> Result<Self> {
        for &(b, d) in &pairs {
            if b >= d || d > spec.count() {
                return Err(Error::InvalidGrid(format!(
                    "index pair ({b}, {d}) is not an interval on a grid with {} steps",
                    spec.count()
                )));
            }
        }
        Ok(GridBarcode {
            spec,
            pairs,
            degree: 0,
        })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Pairs in the rescaled coordinates `{0, 2, ..., 2m}`.
    pub fn rescaled_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|&(b, d)| (2 * b, 2 * d))
    }

    pub fn to_barcode(&self) -> Barcode {
        let pairs = self
            .pairs
            .iter()
            .map(|&(b, d)| {
                BirthDeathPair::new(self.spec.node(b), self.spec.node(d))
                    .expect("grid nodes are strictly increasing")
            })
            .collect();
        Barcode {
            pairs,
            degree: self.degree,
        }
    }
}

/// Moves every endpoint to its nearest grid node, dropping pairs that collapse.
pub fn snap_to_grid(barcode: &Barcode, spec: GridSpec) -> Result<Parsed<GridBarcode>> {
    let mut pairs = Vec::with_capacity(barcode.len());
    let mut warnings = Vec::new();
    for (i, p) in barcode.pairs.iter().enumerate() {
        let b = spec.nearest(p.birth())?;
        let d = spec.nearest(p.death())?;
        if b == d {
            warnings.push(Warning {
                line: 0,
                message: format!(
                    "pair {} ({}, {}) collapses onto grid node {b} and was dropped",
                    i + 1,
                    p.birth(),
                    p.death()
                ),
            });
        } else {
            pairs.push((b, d));
        }
    }
    let mut value = GridBarcode::new(spec, pairs)?;
    value.degree = barcode.degree;
    Ok(Parsed { value, warnings })
}

/// `n` pairs drawn as the ordered pair of two independent uniform `[0, 1)`
/// variates.
pub fn random_barcode(n: usize, seed: u64) -> Barcode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_barcode_with(n, &mut rng)
}

pub fn random_barcode_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Barcode {
    let mut pairs = Vec::with_capacity(n);
    while pairs.len() < n {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        if u == v {
            continue;
        }
        let pair = BirthDeathPair::new(u.min(v), u.max(v)).expect("distinct finite values");
        pairs.push(pair);
    }
    Barcode::new(pairs)
}
