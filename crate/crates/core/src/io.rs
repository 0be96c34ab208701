//! Text formats: landscape files, file lists, the configuration file and
//! gnuplot output.
//!
//! A landscape file starts with the homological degree on its own line,
//! followed by one block per layer:
//!
//! ```text
//! 0
//! #lambda_0
//! 1 0
//! 2.5 1.5
//! 4 0
//! #lambda_1
//! 2 0
//! 2.5 0.5
//! 3 0
//!
//! ```
//!
//! Block `#lambda_i` holds layer `k = i + 1`. The points at `x = +-inf` are
//! implicit unless a layer is nonzero there.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::algebra::{average_with, CombineOptions, LandscapeCombination};
use crate::barcode::{
    parse_barcode, parse_number, snap_to_grid, Barcode, GridSpec, ParseOptions, Parsed, Warning,
};
use crate::grid::{build_grid_landscape, sample_exact_to_grid, GridLandscape};
use crate::landscape::{build_landscape, CriticalPoint, Layer, Layered};
use crate::stats::Summary;
use crate::{Error, Result};

/// Formats like C's `%.{precision}g`: `precision` significant digits,
/// trailing zeros removed, exponent notation for very large or small
/// magnitudes.
pub fn format_general(x: f64, precision: usize) -> String {
    let precision = precision.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", precision - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= precision as i32 {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exponent.abs())
    } else {
        let decimals = (precision as i32 - 1 - exponent) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let wrap = |e: std::io::Error| Error::from(e).in_file(path);
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    file.write_all(contents).map_err(wrap)?;
    file.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))
}

fn layer_marker(line: &str) -> Option<&str> {
    line.strip_prefix("#lambda_")
}

/// Parses the landscape file format.
pub fn parse_landscape(text: &str, options: &ParseOptions) -> Result<LandscapeCombination> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let Some((line, header)) = lines.next() else {
        return Err(Error::parse(1, "missing degree line"));
    };
    let degree: usize = header
        .parse()
        .map_err(|_| Error::parse(line, format!("expected the degree, found {header:?}")))?;

    let mut layers: Vec<Layer> = Vec::new();
    let mut current: Option<(usize, Vec<CriticalPoint>)> = None;
    let finish =
        |layers: &mut Vec<Layer>, block: Option<(usize, Vec<CriticalPoint>)>| -> Result<()> {
            if let Some((line, points)) = block {
                let layer =
                    Layer::from_points(points).map_err(|e| Error::parse(line, e.to_string()))?;
                layers.push(layer);
            }
            Ok(())
        };
    for (line, text) in lines {
        if let Some(index) = layer_marker(text) {
            let index: usize = index
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("bad layer marker {text:?}")))?;
            finish(&mut layers, current.take())?;
            if index < layers.len() {
                return Err(Error::parse(
                    line,
                    format!("layer {index} appears out of order"),
                ));
            }
            layers.resize(index, Layer::zero());
            current = Some((line, Vec::new()));
            continue;
        }
        let Some((_, points)) = current.as_mut() else {
            return Err(Error::parse(
                line,
                "critical point before the first #lambda_ marker",
            ));
        };
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected \"x y\", found {text:?}"),
            ));
        }
        let x = options.decode(parse_number(tokens[0], line)?);
        let y = options.decode(parse_number(tokens[1], line)?);
        if let Some(last) = points.last() {
            if last.x.partial_cmp(&x) != Some(std::cmp::Ordering::Less) {
                return Err(Error::parse(
                    line,
                    format!(
                        "critical numbers must increase strictly ({x} follows {})",
                        last.x
                    ),
                ));
            }
        }
        points.push(CriticalPoint::new(x, y));
    }
    finish(&mut layers, current.take())?;
    Ok(LandscapeCombination::new(layers, degree))
}

/// Renders a landscape in the file format, numbers with 17 significant
/// digits so that reading back is exact.
pub fn write_landscape<L: Layered + ?Sized>(
    landscape: &L,
    options: &ParseOptions,
) -> Result<String> {
    let mut out = format!("{}\n", landscape.degree());
    if landscape.depth() == 0 {
        return Ok(out);
    }
    for (i, layer) in landscape.layers().iter().enumerate() {
        writeln!(out, "#lambda_{i}").expect("writing to a string");
        let points = layer.points();
        let last = points.len() - 1;
        for (j, p) in points.iter().enumerate() {
            let sentinel = j == 0 || j == last;
            if sentinel && p.y == 0.0 {
                continue;
            }
            if !(p.x.is_finite() && p.y.is_finite()) && options.infinity.is_none() {
                return Err(Error::Format(format!(
                    "layer {} has infinite values; set an infinity magic number or truncate first",
                    i + 1
                )));
            }
            writeln!(out, "{} {}", options.encode(p.x), options.encode(p.y))
                .expect("writing to a string");
        }
    }
    out.push('\n');
    Ok(out)
}

pub fn read_landscape_file(path: &Path, options: &ParseOptions) -> Result<LandscapeCombination> {
    parse_landscape(&read_text(path)?, options).map_err(|e| e.in_file(path))
}

pub fn write_landscape_file<L: Layered + ?Sized>(
    landscape: &L,
    path: &Path,
    options: &ParseOptions,
) -> Result<()> {
    write_atomic(path, write_landscape(landscape, options)?.as_bytes())
}

/// Contents of an input file of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Loaded {
    Barcode(Parsed<Barcode>),
    Landscape(LandscapeCombination),
}

/// A landscape file is recognised by a lone integer on its first line
/// followed by a `#lambda_` marker or by nothing at all.
fn looks_like_landscape(text: &str) -> bool {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let Some(first) = lines.next() else {
        return false;
    };
    if first.parse::<usize>().is_err() {
        return false;
    }
    match lines.next() {
        None => true,
        Some(second) => second.starts_with("#lambda"),
    }
}

pub fn detect_and_parse(text: &str, options: &ParseOptions) -> Result<Loaded> {
    let as_landscape = |t| parse_landscape(t, options).map(Loaded::Landscape);
    let as_barcode = |t| parse_barcode(t, options).map(Loaded::Barcode);
    let (first, second) = if looks_like_landscape(text) {
        (as_landscape(text), None)
    } else {
        (as_barcode(text), Some(()))
    };
    match first {
        Ok(v) => Ok(v),
        Err(e1) => {
            let (e_landscape, e_barcode) = match second {
                None => match as_barcode(text) {
                    Ok(v) => return Ok(v),
                    Err(e2) => (e1, e2),
                },
                Some(()) => match as_landscape(text) {
                    Ok(v) => return Ok(v),
                    Err(e2) => (e2, e1),
                },
            };
            Err(Error::Format(format!(
                "not a landscape file ({e_landscape}) and not a barcode file ({e_barcode})"
            )))
        }
    }
}

pub fn detect_and_load(path: &Path, options: &ParseOptions) -> Result<Loaded> {
    detect_and_parse(&read_text(path)?, options).map_err(|e| e.in_file(path))
}

/// Reads a file list: one path per line, blank lines and `#` comments
/// skipped. Relative paths that do not exist as given are resolved against
/// the list's directory.
pub fn read_file_list(path: &Path) -> Result<Vec<PathBuf>> {
    let text = read_text(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let entries: Vec<PathBuf> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = PathBuf::from(l);
            if p.is_relative() && !p.exists() {
                base.join(p)
            } else {
                p
            }
        })
        .collect();
    if entries.is_empty() {
        return Err(Error::NoInput.in_file(path));
    }
    Ok(entries)
}

/// How barcodes become landscapes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Grid(GridSpec),
}

/// Library settings read from a `key = value` file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToolboxConfig {
    /// Magnitude used to encode infinities in files.
    pub infinity: Option<f64>,
    pub mode: Mode,
    pub epsilon_merge: f64,
    pub strict_parse: bool,
}

impl Default for ToolboxConfig {
    fn default() -> Self {
        ToolboxConfig {
            infinity: None,
            mode: Mode::Exact,
            epsilon_merge: 0.0,
            strict_parse: true,
        }
    }
}

impl ToolboxConfig {
    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            infinity: self.infinity,
            strict: self.strict_parse,
        }
    }

    pub fn combine_options(&self) -> CombineOptions {
        CombineOptions {
            epsilon_merge: self.epsilon_merge,
        }
    }
}

pub fn parse_config(text: &str) -> Result<ToolboxConfig> {
    let mut config = ToolboxConfig::default();
    let mut grid_mode = false;
    let (mut begin, mut spacing, mut count) = (None, None, None);
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config(format!("line {line}: expected key = value")));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad =
            |what: &str| Error::Config(format!("line {line}: {key}: {what}, found {value:?}"));
        let real = || -> Result<f64> {
            match value.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(bad("expected a finite number")),
            }
        };
        match key {
            "infinity" => {
                let v = real()?;
                if v <= 0.0 {
                    return Err(bad("expected a positive number"));
                }
                config.infinity = Some(v);
            }
            "mode" => {
                grid_mode = match value {
                    "exact" => false,
                    "grid" => true,
                    _ => return Err(bad("expected exact or grid")),
                }
            }
            "grid_begin" => begin = Some(real()?),
            "grid_spacing" => spacing = Some(real()?),
            "grid_count" => {
                count = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| bad("expected a positive integer"))?,
                )
            }
            "epsilon_merge" => {
                let v = real()?;
                if v < 0.0 {
                    return Err(bad("expected a nonnegative number"));
                }
                config.epsilon_merge = v;
            }
            "strict_parse" => {
                config.strict_parse = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(bad("expected true or false")),
                }
            }
            _ => return Err(Error::Config(format!("line {line}: unknown key {key:?}"))),
        }
    }
    let any_grid = begin.is_some() || spacing.is_some() || count.is_some();
    if grid_mode {
        match (begin, spacing, count) {
            (Some(b), Some(s), Some(c)) => {
                config.mode =
                    Mode::Grid(GridSpec::new(b, s, c).map_err(|e| Error::Config(e.to_string()))?)
            }
            _ => {
                return Err(Error::Config(
                    "mode = grid needs grid_begin, grid_spacing and grid_count".into(),
                ))
            }
        }
    } else if any_grid {
        return Err(Error::Config(
            "grid settings are only allowed with mode = grid".into(),
        ));
    }
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ToolboxConfig> {
    parse_config(&read_text(path)?).map_err(|e| e.in_file(path))
}

/// Summaries that can be built from either kind of input file.
pub trait FromInput: Summary {
    fn from_barcode(barcode: &Barcode, config: &ToolboxConfig) -> Result<Parsed<Self>>;

    fn from_landscape(landscape: LandscapeCombination, config: &ToolboxConfig) -> Result<Self>;

    fn to_landscape(&self) -> Result<LandscapeCombination>;

    /// The average, honouring the combination settings of `config`.
    fn average_configured(items: &[&Self], _config: &ToolboxConfig) -> Result<Self> {
        Self::average_of(items)
    }
}

impl FromInput for LandscapeCombination {
    fn from_barcode(barcode: &Barcode, _config: &ToolboxConfig) -> Result<Parsed<Self>> {
        Ok(Parsed {
            value: build_landscape(barcode).into(),
            warnings: Vec::new(),
        })
    }

    fn from_landscape(landscape: LandscapeCombination, _config: &ToolboxConfig) -> Result<Self> {
        Ok(landscape)
    }

    fn to_landscape(&self) -> Result<LandscapeCombination> {
        Ok(self.clone())
    }

    fn average_configured(items: &[&Self], config: &ToolboxConfig) -> Result<Self> {
        average_with(items, &config.combine_options())
    }
}

fn grid_spec(config: &ToolboxConfig) -> Result<GridSpec> {
    match config.mode {
        Mode::Grid(spec) => Ok(spec),
        Mode::Exact => Err(Error::Config("grid summaries need mode = grid".into())),
    }
}

impl FromInput for GridLandscape {
    fn from_barcode(barcode: &Barcode, config: &ToolboxConfig) -> Result<Parsed<Self>> {
        let snapped = snap_to_grid(barcode, grid_spec(config)?)?;
        Ok(Parsed {
            value: build_grid_landscape(&snapped.value),
            warnings: snapped.warnings,
        })
    }

    fn from_landscape(landscape: LandscapeCombination, config: &ToolboxConfig) -> Result<Self> {
        Ok(sample_exact_to_grid(&landscape, grid_spec(config)?))
    }

    fn to_landscape(&self) -> Result<LandscapeCombination> {
        self.to_combination()
    }
}

/// Loads any input file as a summary of type `T`.
pub fn load_input<T: FromInput>(path: &Path, config: &ToolboxConfig) -> Result<Parsed<T>> {
    let loaded = detect_and_load(path, &config.parse_options())?;
    let result = match loaded {
        Loaded::Barcode(parsed) => T::from_barcode(&parsed.value, config).map(|p| Parsed {
            value: p.value,
            warnings: parsed.warnings.into_iter().chain(p.warnings).collect(),
        }),
        Loaded::Landscape(l) => T::from_landscape(l, config).map(|value| Parsed {
            value,
            warnings: Vec::new(),
        }),
    };
    result.map_err(|e| e.in_file(path))
}

/// Summaries loaded from a file list, with the warnings raised per file.
pub type LoadedList<T> = (Vec<T>, Vec<(PathBuf, Warning)>);

/// Loads every file named in a file list.
pub fn load_file_list<T: FromInput>(path: &Path, config: &ToolboxConfig) -> Result<LoadedList<T>> {
    let mut items = Vec::new();
    let mut warnings = Vec::new();
    for file in read_file_list(path)? {
        let parsed = load_input::<T>(&file, config)?;
        warnings.extend(parsed.warnings.into_iter().map(|w| (file.clone(), w)));
        items.push(parsed.value);
    }
    Ok((items, warnings))
}

/// Gnuplot data for layers with file indices `k_from..k_to`, one block per
/// layer separated by two blank lines. Returns the rendered data and a
/// notice for every requested layer that does not exist.
pub fn render_gnuplot<L: Layered + ?Sized>(
    landscape: &L,
    k_from: usize,
    k_to: usize,
) -> Result<(String, Vec<usize>, Vec<String>)> {
    if k_from >= k_to {
        return Err(Error::InvalidArgument(format!(
            "empty layer range {k_from}..{k_to}"
        )));
    }
    let finite_x = landscape
        .layers()
        .iter()
        .flat_map(|l| l.critical_numbers())
        .filter(|x| x.is_finite());
    let (lo, hi) = finite_x.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    let mut blocks = Vec::new();
    let mut plotted = Vec::new();
    let mut notices = Vec::new();
    for index in k_from..k_to {
        let Some(layer) = landscape.layers().get(index) else {
            notices.push(format!(
                "layer {index} does not exist (the landscape has {} layers)",
                landscape.depth()
            ));
            continue;
        };
        let points = layer.points();
        let mut rows: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        if points[0].y != 0.0 && lo.is_finite() {
            rows.push((lo, layer.evaluate(lo)));
        }
        rows.extend(layer.interior().iter().map(|p| (p.x, p.y)));
        if points[points.len() - 1].y != 0.0 && hi.is_finite() {
            rows.push((hi, layer.evaluate(hi)));
        }
        rows.dedup_by(|a, b| a.0 == b.0);
        let mut block = String::new();
        for (x, y) in rows {
            writeln!(block, "{} {}", format_general(x, 17), format_general(y, 17))
                .expect("writing to a string");
        }
        blocks.push(block);
        plotted.push(index);
    }
    Ok((blocks.join("\n\n"), plotted, notices))
}

/// Writes gnuplot data to `path` and a plot script next to it (same name
/// with extension `gp`). Returns the notices of [`render_gnuplot`].
pub fn emit_gnuplot<L: Layered + ?Sized>(
    landscape: &L,
    k_from: usize,
    k_to: usize,
    path: &Path,
) -> Result<Vec<String>> {
    let (data, plotted, notices) = render_gnuplot(landscape, k_from, k_to)?;
    write_atomic(path, data.as_bytes())?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut script = String::from("set xlabel 'x'\nset ylabel 'lambda'\n");
    if plotted.is_empty() {
        script.push_str("# no layers in the requested range\n");
    } else {
        let parts: Vec<String> = plotted
            .iter()
            .enumerate()
            .map(|(block, layer)| {
                let file = if block == 0 {
                    format!("'{name}'")
                } else {
                    "''".to_string()
                };
                format!("{file} index {block} with lines title 'lambda_{layer}'")
            })
            .collect();
        writeln!(script, "plot {}", parts.join(", \\\n     ")).expect("writing to a string");
        script.push_str("pause -1\n");
    }
    write_atomic(&path.with_extension("gp"), script.as_bytes())?;
    Ok(notices)
}
