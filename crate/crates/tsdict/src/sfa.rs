//! Symbolic Fourier Approximation: sliding windows to symbolic words.
//!
//! Each window of a series is (optionally z-normalised and) transformed with
//! a truncated discrete Fourier transform; the retained real/imaginary parts
//! are discretised per coefficient position against a learned breakpoint
//! table, giving a word of `word_length` letters over a small alphabet.
//! Breakpoints come either from equal-frequency binning over all training
//! windows (MCB) or from supervised information gain binning (IGB). Bags
//! count words per series with numerosity reduction (a word equal to its
//! predecessor is skipped) and can additionally count bigrams pairing each
//! window with the previous non-overlapping one.

use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Breakpoint learning strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Binning {
    /// Equal-frequency binning of each coefficient position.
    Mcb,
    /// Recursive binary splits maximising information gain on class labels.
    Igb,
}

impl std::fmt::Display for Binning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Binning::Mcb => write!(f, "MCB"),
            Binning::Igb => write!(f, "IGB"),
        }
    }
}

/// Parameters of one SFA transform.
///
/// Ensemble builders restrict these to the search ranges used for member
/// selection (`word_length` in {8,10,12,14,16}, `alphabet_size` 4,
/// `window_length` in {10..m}); the type itself only enforces what the
/// packed word representation needs, so small hand-built configurations
/// remain expressible in tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SfaParameters {
    pub word_length: usize,
    pub alphabet_size: usize,
    pub window_length: usize,
    pub normalise: bool,
    pub binning: Binning,
}

impl SfaParameters {
    pub fn new(
        word_length: usize,
        alphabet_size: usize,
        window_length: usize,
        normalise: bool,
        binning: Binning,
    ) -> Result<Self> {
        if word_length == 0 || word_length % 2 != 0 || word_length > 16 {
            return Err(Error::InvalidParameters(format!(
                "word length must be even and in 2..=16, got {word_length}"
            )));
        }
        if !(2..=4).contains(&alphabet_size) {
            return Err(Error::InvalidParameters(format!(
                "alphabet size must be in 2..=4, got {alphabet_size}"
            )));
        }
        let required = word_length / 2 + usize::from(normalise);
        if window_length < required {
            return Err(Error::InvalidParameters(format!(
                "window length {window_length} cannot supply {required} Fourier coefficients"
            )));
        }
        Ok(Self {
            word_length,
            alphabet_size,
            window_length,
            normalise,
            binning,
        })
    }
}

/// Per-position interior breakpoints: `word_length` rows of
/// `alphabet_size - 1` non-decreasing thresholds (the outer +-infinity
/// boundaries are implicit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakpointTable {
    rows: Vec<Vec<f64>>,
}

impl BreakpointTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.windows(2).all(|w| w[0] <= w[1])));
        Self { rows }
    }

    pub fn n_positions(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Letter for `value` at position `row`: the number of breakpoints
    /// strictly below it, so a value equal to a breakpoint falls in the
    /// lower bin.
    pub fn letter(&self, row: usize, value: f64) -> usize {
        self.rows[row].iter().filter(|&&b| b < value).count()
    }
}

/// Letters of one word packed two bits each (alphabet size <= 4,
/// word length <= 16).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PackedWord(u32);

impl PackedWord {
    pub fn from_letters(letters: &[usize]) -> Self {
        debug_assert!(letters.len() <= 16);
        let mut bits = 0u32;
        for (i, &l) in letters.iter().enumerate() {
            debug_assert!(l < 4);
            bits |= (l as u32) << (2 * i);
        }
        PackedWord(bits)
    }

    pub fn letter(&self, i: usize) -> usize {
        ((self.0 >> (2 * i)) & 0b11) as usize
    }

    pub fn bits(&self) -> u32 {
        self.0
    }
}

/// Bag key: a word plus its bigram pairing and pyramid region tags.
///
/// Layout (low to high): 32 bits current word, 32 bits previous word for
/// bigrams, 1 kind bit, 2 bits pyramid level, 2 bits region index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordKey(u128);

impl WordKey {
    pub fn unigram(word: PackedWord, level: usize, region: usize) -> Self {
        debug_assert!((1..=3).contains(&level) && region < 4);
        WordKey(word.0 as u128 | ((level as u128) << 65) | ((region as u128) << 67))
    }

    pub fn bigram(prev: PackedWord, word: PackedWord, level: usize, region: usize) -> Self {
        debug_assert!((1..=3).contains(&level) && region < 4);
        WordKey(
            word.0 as u128
                | ((prev.0 as u128) << 32)
                | (1 << 64)
                | ((level as u128) << 65)
                | ((region as u128) << 67),
        )
    }

    pub fn is_bigram(&self) -> bool {
        (self.0 >> 64) & 1 == 1
    }

    pub fn level(&self) -> usize {
        ((self.0 >> 65) & 0b11) as usize
    }

    pub fn region(&self) -> usize {
        ((self.0 >> 67) & 0b11) as usize
    }

    pub fn word(&self) -> PackedWord {
        PackedWord(self.0 as u32)
    }

    pub fn previous_word(&self) -> Option<PackedWord> {
        self.is_bigram().then_some(PackedWord((self.0 >> 32) as u32))
    }
}

impl Serialize for WordKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:x}", self.0))
    }
}

impl<'de> Deserialize<'de> for WordKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        u128::from_str_radix(&text, 16)
            .map(WordKey)
            .map_err(serde::de::Error::custom)
    }
}

/// Sparse word histogram for one series. No zero-count entries are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bag {
    counts: HashMap<WordKey, u32>,
}

impl Bag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: WordKey, count: u32) {
        if count > 0 {
            *self.counts.entry(key).or_insert(0) += count;
        }
    }

    pub fn count(&self, key: &WordKey) -> u32 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WordKey, &u32)> {
        self.counts.iter()
    }

    /// Total count over all entries.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    /// Entries sorted by key, for deterministic serialisation.
    pub fn sorted_entries(&self) -> Vec<(WordKey, u32)> {
        let mut entries: Vec<_> = self.counts.iter().map(|(&k, &c)| (k, c)).collect();
        entries.sort_unstable();
        entries
    }
}

impl FromIterator<(WordKey, u32)> for Bag {
    fn from_iter<I: IntoIterator<Item = (WordKey, u32)>>(iter: I) -> Self {
        let mut bag = Bag::new();
        for (k, c) in iter {
            bag.add(k, c);
        }
        bag
    }
}

impl Serialize for Bag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.sorted_entries().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<(WordKey, u32)>::deserialize(d)?;
        Ok(entries.into_iter().collect())
    }
}

/// The per-window word sequence of one series, before numerosity reduction.
/// The word at index `j` comes from the window starting at `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSequence {
    pub words: Vec<PackedWord>,
    pub window_length: usize,
    pub series_length: usize,
}

impl WordSequence {
    /// Plain (single-region) bag: numerosity-reduced unigrams, plus bigrams
    /// pairing each window with the one `window_length` earlier when enabled.
    /// Bigrams are never numerosity-reduced.
    pub fn bag(&self, use_bigrams: bool) -> Bag {
        let mut bag = Bag::new();
        let mut previous = None;
        for &word in &self.words {
            if previous != Some(word) {
                bag.add(WordKey::unigram(word, 1, 0), 1);
            }
            previous = Some(word);
        }
        if use_bigrams {
            let w = self.window_length;
            for j in w..self.words.len() {
                bag.add(WordKey::bigram(self.words[j - w], self.words[j], 1, 0), 1);
            }
        }
        bag
    }
}

fn z_normalise(window: &[f64]) -> Vec<f64> {
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    // A (numerically) constant window normalises to the zero vector.
    if std <= 1e-12 * mean.abs().max(1.0) {
        return vec![0.0; window.len()];
    }
    window.iter().map(|v| (v - mean) / std).collect()
}

#[inline]
fn twiddle(freq: usize, t: usize, window_length: usize) -> (f64, f64) {
    let angle = TAU * (freq as f64) * (t as f64) / (window_length as f64);
    (angle.cos(), -angle.sin())
}

/// Truncated DFT of one window, interleaved as `(re, im)` pairs.
///
/// With `normalise` the window is z-normalised first and the DC coefficient
/// is dropped, keeping frequencies `1..=word_length/2`; otherwise frequencies
/// `0..word_length/2` are kept. The result has `word_length` real values.
pub fn window_dft(window: &[f64], word_length: usize, normalise: bool) -> Result<Vec<f64>> {
    let w = window.len();
    let half = word_length / 2;
    let required = half + usize::from(normalise);
    if w < required {
        return Err(Error::InsufficientWindow {
            window: w,
            required,
        });
    }
    let data;
    let samples: &[f64] = if normalise {
        data = z_normalise(window);
        &data
    } else {
        window
    };
    let first_freq = usize::from(normalise);
    let mut out = Vec::with_capacity(word_length);
    for f in 0..half {
        let freq = first_freq + f;
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, &x) in samples.iter().enumerate() {
            let (c, s) = twiddle(freq, t, w);
            re += x * c;
            im += x * s;
        }
        out.push(re);
        out.push(im);
    }
    Ok(out)
}

/// Equal-frequency breakpoints per coefficient position.
///
/// Each breakpoint is the midpoint of the two sorted values straddling the
/// quantile index, so with distinct values the bins differ in size by at
/// most one. Constant columns yield breakpoints equal to the constant and
/// every value then maps to letter 0 under the strict-less rule.
pub fn mcb_fit(coefficients: &[Vec<f64>], alphabet_size: usize) -> BreakpointTable {
    let n = coefficients.len();
    assert!(n >= 1, "mcb_fit needs at least one window");
    let positions = coefficients[0].len();
    let mut rows = Vec::with_capacity(positions);
    for pos in 0..positions {
        let mut column: Vec<f64> = coefficients.iter().map(|row| row[pos]).collect();
        column.sort_unstable_by(f64::total_cmp);
        rows.push(equal_frequency_breakpoints(&column, alphabet_size));
    }
    BreakpointTable::new(rows)
}

/// Breakpoints for a sorted slice, `alphabet_size - 1` of them.
fn equal_frequency_breakpoints(sorted: &[f64], alphabet_size: usize) -> Vec<f64> {
    let n = sorted.len();
    let mut breakpoints = Vec::with_capacity(alphabet_size - 1);
    for i in 1..alphabet_size {
        if n == 1 {
            breakpoints.push(sorted[0]);
            continue;
        }
        let idx = (i * n / alphabet_size).clamp(1, n - 1);
        breakpoints.push((sorted[idx - 1] + sorted[idx]) / 2.0);
    }
    breakpoints
}

/// Supervised breakpoints per position by recursive binary splitting.
///
/// At each step the split candidate (a midpoint between adjacent distinct
/// values) with the highest information gain on the class labels is chosen,
/// then each side is split recursively until `alphabet_size` bins exist.
/// Segments where no split has positive gain fall back to equal-frequency
/// splitting.
pub fn igb_fit(
    coefficients: &[Vec<f64>],
    labels: &[usize],
    alphabet_size: usize,
) -> BreakpointTable {
    let n = coefficients.len();
    assert!(n >= 1 && labels.len() == n, "igb_fit needs aligned labels");
    let n_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let positions = coefficients[0].len();
    let mut rows = Vec::with_capacity(positions);
    for pos in 0..positions {
        let mut pairs: Vec<(f64, usize)> = coefficients
            .iter()
            .zip(labels)
            .map(|(row, &label)| (row[pos], label))
            .collect();
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut breakpoints = Vec::with_capacity(alphabet_size - 1);
        split_by_gain(&pairs, alphabet_size, n_classes, &mut breakpoints);
        debug_assert_eq!(breakpoints.len(), alphabet_size - 1);
        rows.push(breakpoints);
    }
    BreakpointTable::new(rows)
}

fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.ln();
        }
    }
    h
}

/// Emit `bins - 1` breakpoints for a sorted (value, label) segment.
fn split_by_gain(pairs: &[(f64, usize)], bins: usize, n_classes: usize, out: &mut Vec<f64>) {
    if bins <= 1 {
        return;
    }
    let n = pairs.len();
    let mut total_counts = vec![0usize; n_classes];
    for &(_, label) in pairs {
        total_counts[label] += 1;
    }
    let parent = entropy(&total_counts, n);

    // Scan split positions between adjacent distinct values; gains computed
    // from running left-side counts.
    let mut best: Option<(f64, usize)> = None; // (gain, split position)
    let mut left_counts = vec![0usize; n_classes];
    for i in 1..n {
        left_counts[pairs[i - 1].1] += 1;
        if pairs[i].0 <= pairs[i - 1].0 {
            continue;
        }
        let right_counts: Vec<usize> = total_counts
            .iter()
            .zip(&left_counts)
            .map(|(&t, &l)| t - l)
            .collect();
        let weighted = (i as f64 / n as f64) * entropy(&left_counts, i)
            + ((n - i) as f64 / n as f64) * entropy(&right_counts, n - i);
        let gain = parent - weighted;
        if best.map_or(true, |(g, _)| gain > g) {
            best = Some((gain, i));
        }
    }

    match best {
        Some((gain, split)) if gain > 1e-12 => {
            let threshold = (pairs[split - 1].0 + pairs[split].0) / 2.0;
            let left_bins = bins / 2;
            let right_bins = bins - left_bins;
            split_by_gain(&pairs[..split], left_bins, n_classes, out);
            out.push(threshold);
            split_by_gain(&pairs[split..], right_bins, n_classes, out);
        }
        _ => {
            // No informative split in this segment.
            let values: Vec<f64> = pairs.iter().map(|&(v, _)| v).collect();
            out.extend(equal_frequency_breakpoints(&values, bins));
        }
    }
}

/// Map a coefficient vector to a word via the strict-less letter rule.
pub fn discretise(coefficients: &[f64], table: &BreakpointTable) -> PackedWord {
    debug_assert_eq!(coefficients.len(), table.n_positions());
    let letters: Vec<usize> = coefficients
        .iter()
        .enumerate()
        .map(|(i, &v)| table.letter(i, v))
        .collect();
    PackedWord::from_letters(&letters)
}

/// A fitted transform: parameters plus learned breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfaTransform {
    pub params: SfaParameters,
    pub breakpoints: BreakpointTable,
}

impl SfaTransform {
    /// Fit breakpoints on all training windows and return the transform along
    /// with each training series' word sequence.
    ///
    /// For IGB every window inherits the class of its source series.
    pub fn fit(
        series: &[Vec<f64>],
        labels: &[usize],
        params: SfaParameters,
    ) -> Result<(Self, Vec<WordSequence>)> {
        let w = params.window_length;
        let mut coefficient_rows: Vec<Vec<f64>> = Vec::new();
        let mut window_labels: Vec<usize> = Vec::new();
        let mut per_series_counts: Vec<usize> = Vec::with_capacity(series.len());
        for (s, &label) in series.iter().zip(labels) {
            if s.len() < w {
                return Err(Error::SeriesTooShort {
                    length: s.len(),
                    window: w,
                });
            }
            let n_windows = s.len() - w + 1;
            per_series_counts.push(n_windows);
            for j in 0..n_windows {
                coefficient_rows.push(window_dft(
                    &s[j..j + w],
                    params.word_length,
                    params.normalise,
                )?);
                window_labels.push(label);
            }
        }

        let breakpoints = match params.binning {
            Binning::Mcb => mcb_fit(&coefficient_rows, params.alphabet_size),
            Binning::Igb => igb_fit(&coefficient_rows, &window_labels, params.alphabet_size),
        };

        let mut sequences = Vec::with_capacity(series.len());
        let mut offset = 0;
        for (s, &count) in series.iter().zip(&per_series_counts) {
            let words = coefficient_rows[offset..offset + count]
                .iter()
                .map(|row| discretise(row, &breakpoints))
                .collect();
            offset += count;
            sequences.push(WordSequence {
                words,
                window_length: w,
                series_length: s.len(),
            });
        }
        Ok((
            SfaTransform {
                params,
                breakpoints,
            },
            sequences,
        ))
    }

    /// Word sequence of an unseen series under the fitted breakpoints.
    pub fn word_sequence(&self, series: &[f64]) -> Result<WordSequence> {
        let w = self.params.window_length;
        if series.len() < w {
            return Err(Error::SeriesTooShort {
                length: series.len(),
                window: w,
            });
        }
        let words = (0..=series.len() - w)
            .map(|j| {
                window_dft(&series[j..j + w], self.params.word_length, self.params.normalise)
                    .map(|row| discretise(&row, &self.breakpoints))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WordSequence {
            words,
            window_length: w,
            series_length: series.len(),
        })
    }
}

/// Transform one series against fitted breakpoints and form its plain bag.
pub fn series_to_bag(
    series: &[f64],
    params: &SfaParameters,
    breakpoints: &BreakpointTable,
    use_bigrams: bool,
) -> Result<Bag> {
    let transform = SfaTransform {
        params: *params,
        breakpoints: breakpoints.clone(),
    };
    Ok(transform.word_sequence(series)?.bag(use_bigrams))
}
