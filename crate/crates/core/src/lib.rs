//! # landscape-toolbox
//!
//! Persistence landscapes for statistical topological data analysis.
//!
//! The crate turns persistence barcodes into persistence landscapes and
//! provides the vector-space machinery needed to do statistics with them:
//!
//! * [`barcode`] - parsing, canonical ordering, truncation of infinite
//!   intervals, grid snapping and random barcode generation.
//! * [`landscape`] - the exact landscape built by a single sorted sweep,
//!   including barcodes with infinite intervals.
//! * [`grid`] - landscapes sampled on an evenly spaced grid, with error bounds.
//! * [`algebra`] - linear combinations and (binary tree) averages.
//! * [`metrics`] - `L^p`/`L^inf` norms, distances and inner products computed
//!   by closed-form integration over linear pieces.
//! * [`stats`] - distance matrices, permutation tests and nearest-average
//!   classifiers.
//! * [`io`] - the text file formats, the configuration file and gnuplot output.
//!
//! With the default `parallel` feature, the data-parallel loops (per-layer
//! work, tree merge levels, distance matrix entries, permutation trials) run
//! on the rayon global pool. Without it everything runs sequentially; results
//! are identical either way.
//!
//! # Example
//!
//! ```
//! use landscape_toolbox::barcode::Barcode;
//! use landscape_toolbox::landscape::{build_landscape, Layered};
//! use landscape_toolbox::metrics::{lp_norm, Norm};
//!
//! let barcode = Barcode::from_finite(&[(1.0, 4.0), (2.0, 3.0)]).unwrap();
//! let landscape = build_landscape(&barcode);
//! assert_eq!(landscape.depth(), 2);
//! assert_eq!(landscape.evaluate(1, 2.5), 1.5);
//! let l1 = lp_norm(&landscape, Norm::Lp(1.0)).unwrap();
//! assert!((l1 - (2.25 + 0.25)).abs() < 1e-12);
//! ```

pub mod algebra;
pub mod barcode;
mod error;
pub mod grid;
pub mod io;
pub mod landscape;
pub mod metrics;
pub mod oracle;
mod par;
pub mod stats;

pub use error::{Error, Result};
