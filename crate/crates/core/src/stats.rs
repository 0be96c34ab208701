//! Statistics over collections of landscapes: distance matrices, permutation
//! tests and nearest-average classification.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{average, LandscapeCombination};
use crate::grid::{grid_average, grid_lp_distance, GridLandscape};
use crate::io::format_general;
use crate::metrics::{lp_distance, lp_norm, Norm};
use crate::{par, Error, Result};

/// A summary that can be averaged and compared.
pub trait Summary: Sized + Send + Sync {
    fn average_of(items: &[&Self]) -> Result<Self>;

    fn distance(&self, other: &Self, norm: Norm) -> Result<f64>;

    fn norm(&self, norm: Norm) -> Result<f64>;
}

impl Summary for LandscapeCombination {
    fn average_of(items: &[&Self]) -> Result<Self> {
        average(items)
    }

    fn distance(&self, other: &Self, norm: Norm) -> Result<f64> {
        lp_distance(self, other, norm)
    }

    fn norm(&self, norm: Norm) -> Result<f64> {
        lp_norm(self, norm)
    }
}

impl Summary for GridLandscape {
    fn average_of(items: &[&Self]) -> Result<Self> {
        grid_average(items)
    }

    fn distance(&self, other: &Self, norm: Norm) -> Result<f64> {
        grid_lp_distance(self, other, norm)
    }

    fn norm(&self, norm: Norm) -> Result<f64> {
        grid_lp_distance(
            self,
            &GridLandscape::empty(self.spec(), self.degree()),
            norm,
        )
    }
}

/// Symmetric matrix of pairwise distances with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rows of tab-separated values, six significant digits.
    pub fn to_text(&self) -> String {
        matrix_text(&self.entries)
    }
}

pub(crate) fn matrix_text(entries: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in entries {
        let cells: Vec<String> = row.iter().map(|&v| format_general(v, 6)).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// Distances between all inputs, each unordered pair computed once.
pub fn distance_matrix<T: Summary>(items: &[T], norm: Norm) -> Result<DistanceMatrix> {
    if items.is_empty() {
        return Err(Error::NoInput);
    }
    let n = items.len();
    let pairs = upper_pairs(n);
    let values = par::try_map_range(pairs.len(), |t| {
        let (i, j) = pairs[t];
        items[i].distance(&items[j], norm)
    })?;
    let mut entries = vec![vec![0.0; n]; n];
    for (&(i, j), d) in pairs.iter().zip(values) {
        entries[i][j] = d;
        entries[j][i] = d;
    }
    Ok(DistanceMatrix {
        labels: (1..=n).map(|i| i.to_string()).collect(),
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PermutationTestResult {
    /// Distance between the two class averages.
    pub observed_delta: f64,
    pub trials: usize,
    /// Number of shuffles whose distance strictly exceeded `observed_delta`.
    pub exceed_count: usize,
    pub p_value: f64,
    pub seed: u64,
}

/// The generator for one trial: seeded by `seed`, on a stream selected by the
/// trial index, so trials can run in any order.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Two-sample permutation test on the distance between class averages.
pub fn permutation_test<T: Summary>(
    class_a: &[T],
    class_b: &[T],
    trials: usize,
    norm: Norm,
    seed: u64,
) -> Result<PermutationTestResult> {
    permutation_test_with_progress(class_a, class_b, trials, norm, seed, |_| {})
}

/// As [`permutation_test`], calling `progress(completed)` after every trial.
pub fn permutation_test_with_progress<T, F>(
    class_a: &[T],
    class_b: &[T],
    trials: usize,
    norm: Norm,
    seed: u64,
    progress: F,
) -> Result<PermutationTestResult>
where
    T: Summary,
    F: Fn(usize) + Sync + Send,
{
    if class_a.is_empty() {
        return Err(Error::EmptyClass(1));
    }
    if class_b.is_empty() {
        return Err(Error::EmptyClass(2));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "a permutation test needs at least one trial".into(),
        ));
    }
    let pooled: Vec<&T> = class_a.iter().chain(class_b).collect();
    let observed_delta = T::average_of(&pooled[..class_a.len()])?
        .distance(&T::average_of(&pooled[class_a.len()..])?, norm)?;
    let done = AtomicUsize::new(0);
    let exceeded = par::try_map_range(trials, |t| {
        let mut order: Vec<&T> = pooled.clone();
        order.shuffle(&mut trial_rng(seed, t));
        let (a, b) = order.split_at(class_a.len());
        let d = T::average_of(a)?.distance(&T::average_of(b)?, norm)?;
        progress(done.fetch_add(1, AtomicOrdering::Relaxed) + 1);
        Ok::<_, Error>(d > observed_delta)
    })?;
    let exceed_count = exceeded.into_iter().filter(|&e| e).count();
    Ok(PermutationTestResult {
        observed_delta,
        trials,
        exceed_count,
        p_value: exceed_count as f64 / trials as f64,
        seed,
    })
}

/// `p`-values of the permutation test for every pair of classes; the
/// diagonal is 1.
pub fn pairwise_permutation_matrix<T: Summary>(
    classes: &[Vec<T>],
    trials: usize,
    norm: Norm,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    pairwise_permutation_matrix_with_progress(classes, trials, norm, seed, |_, _, _| {})
}

/// As [`pairwise_permutation_matrix`], calling `progress(i, j, completed)`
/// after every trial of the test between classes `i` and `j`.
pub fn pairwise_permutation_matrix_with_progress<T, F>(
    classes: &[Vec<T>],
    trials: usize,
    norm: Norm,
    seed: u64,
    progress: F,
) -> Result<Vec<Vec<f64>>>
where
    T: Summary,
    F: Fn(usize, usize, usize) + Sync + Send,
{
    if classes.len() < 2 {
        return Err(Error::TooFewClasses {
            required: 2,
            actual: classes.len(),
        });
    }
    if let Some(i) = classes.iter().position(Vec::is_empty) {
        return Err(Error::EmptyClass(i + 1));
    }
    let m = classes.len();
    let mut matrix = vec![vec![1.0; m]; m];
    for (i, j) in upper_pairs(m) {
        let result =
            permutation_test_with_progress(&classes[i], &classes[j], trials, norm, seed, |done| {
                progress(i, j, done)
            })?;
        matrix[i][j] = result.p_value;
        matrix[j][i] = result.p_value;
    }
    Ok(matrix)
}

/// Text form of a `p`-value matrix: tab-separated rows.
pub fn p_value_matrix_text(matrix: &[Vec<f64>]) -> String {
    matrix_text(matrix)
}

/// Per-class averages of a training set.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierModel<T> {
    pub class_labels: Vec<String>,
    pub class_averages: Vec<T>,
    pub norm: Norm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifyMode {
    Best,
    Ranked,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    /// Index of the nearest class and its distance.
    Best { class: usize, distance: f64 },
    /// `(class index, distance)` for every class, nearest first.
    Ranked(Vec<(usize, f64)>),
}

impl Classification {
    /// Index of the nearest class.
    pub fn best(&self) -> usize {
        match self {
            Classification::Best { class, .. } => *class,
            Classification::Ranked(list) => list[0].0,
        }
    }
}

impl<T: Summary> ClassifierModel<T> {
    /// Model from precomputed averages, labelled `1..=N`.
    pub fn from_averages(class_averages: Vec<T>, norm: Norm) -> Result<Self> {
        if class_averages.is_empty() {
            return Err(Error::NoInput);
        }
        Ok(ClassifierModel {
            class_labels: (1..=class_averages.len()).map(|i| i.to_string()).collect(),
            class_averages,
            norm,
        })
    }

    pub fn class_count(&self) -> usize {
        self.class_averages.len()
    }

    fn distances(&self, query: &T, norm: Norm) -> Result<Vec<f64>> {
        par::try_map_range(self.class_averages.len(), |i| {
            query.distance(&self.class_averages[i], norm)
        })
    }

    pub fn classify(&self, query: &T, mode: ClassifyMode) -> Result<Classification> {
        Ok(rank(self.distances(query, self.norm)?, mode))
    }
}

/// Sorts by distance; the stable sort breaks ties by lower class index.
fn rank(scores: Vec<f64>, mode: ClassifyMode) -> Classification {
    let mut ranked: Vec<(usize, f64)> = scores.into_iter().enumerate().collect();
    ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
    match mode {
        ClassifyMode::Best => Classification::Best {
            class: ranked[0].0,
            distance: ranked[0].1,
        },
        ClassifyMode::Ranked => Classification::Ranked(ranked),
    }
}

/// Averages each class of the training set.
pub fn classifier_construct<T: Summary>(
    training: &[Vec<T>],
    norm: Norm,
) -> Result<ClassifierModel<T>> {
    if training.is_empty() {
        return Err(Error::NoInput);
    }
    if let Some(i) = training.iter().position(Vec::is_empty) {
        return Err(Error::EmptyClass(i + 1));
    }
    let averages = training
        .iter()
        .map(|class| T::average_of(&class.iter().collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    ClassifierModel::from_averages(averages, norm)
}

pub fn classifier_classify<T: Summary>(
    model: &ClassifierModel<T>,
    query: &T,
    mode: ClassifyMode,
) -> Result<Classification> {
    model.classify(query, mode)
}

/// Classifies using several degrees at once: the score of a class is the sum
/// over degrees of the distance between the query and the class average.
pub fn classifier_all_dims<T: Summary>(
    models: &BTreeMap<usize, ClassifierModel<T>>,
    queries: &BTreeMap<usize, T>,
    norm: Norm,
    mode: ClassifyMode,
) -> Result<Classification> {
    let mut per_degree = models.iter();
    let Some((_, first)) = per_degree.next() else {
        return Err(Error::NoInput);
    };
    if per_degree.any(|(_, m)| m.class_labels != first.class_labels) {
        return Err(Error::ClassMismatch);
    }
    if !models.keys().eq(queries.keys()) {
        let list = |keys: Vec<&usize>| {
            keys.iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        return Err(Error::DegreeMismatch(format!(
            "model degrees [{}], query degrees [{}]",
            list(models.keys().collect()),
            list(queries.keys().collect())
        )));
    }
    let mut scores = vec![0.0; first.class_count()];
    for (degree, model) in models {
        for (score, d) in scores
            .iter_mut()
            .zip(model.distances(&queries[degree], norm)?)
        {
            *score += d;
        }
    }
    Ok(rank(scores, mode))
}
