//! Individual dictionary classifiers: one fitted transform, one bag per
//! training case, a 1-NN rule over bag distances and a leave-one-out train
//! accuracy estimate.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::sfa::{Bag, SfaParameters, SfaTransform, WordKey, WordSequence};
use crate::{Error, Result};

/// How a member compares bags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceMeasure {
    /// Asymmetric squared difference over the words present in the query bag
    /// (lower is closer).
    BossDistance,
    /// Sum of minimum counts over all words (higher is closer).
    HistogramIntersection,
}

/// Full configuration of one ensemble member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndividualConfig {
    pub sfa: SfaParameters,
    /// Spatial pyramid height, 1..=3. Height 1 is a single global region.
    pub pyramid_height: usize,
    pub use_bigrams: bool,
    pub distance: DistanceMeasure,
}

/// One parameterised transform plus nearest-neighbour classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndividualBoss {
    pub config: IndividualConfig,
    pub transform: SfaTransform,
    pub train_bags: Vec<Bag>,
    pub train_labels: Vec<usize>,
    pub train_accuracy: f64,
    pub series_length: usize,
}

/// Asymmetric BOSS distance: only words present in the query bag contribute.
pub fn boss_distance(query: &Bag, reference: &Bag) -> u64 {
    let mut sum = 0u64;
    for (key, &count) in query.iter() {
        let diff = count as i64 - reference.count(key) as i64;
        sum += (diff * diff) as u64;
    }
    sum
}

/// Histogram intersection similarity: sum of per-word minimum counts.
pub fn histogram_intersection(a: &Bag, b: &Bag) -> u64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut sum = 0u64;
    for (key, &count) in small.iter() {
        sum += count.min(large.count(key)) as u64;
    }
    sum
}

/// Build the pyramid-concatenated bag of one word sequence.
///
/// Level `level` (1-based) partitions the series extent into
/// `2^(level-1)` equal regions; each window is assigned to the region holding
/// its start index. Numerosity reduction is applied within each region's
/// word subsequence, and region counts are weighted by `2^(level-1)` so that
/// finer levels dominate. Bigrams, when enabled, are counted once globally
/// at level 1 with no reduction.
pub fn pyramid_bags(sequence: &WordSequence, height: usize, use_bigrams: bool) -> Bag {
    debug_assert!((1..=3).contains(&height));
    let m = sequence.series_length;
    let mut bag = Bag::new();
    for level in 1..=height {
        let regions = 1usize << (level - 1);
        let weight = 1u32 << (level - 1);
        let mut previous: Vec<Option<crate::sfa::PackedWord>> = vec![None; regions];
        for (start, &word) in sequence.words.iter().enumerate() {
            let region = start * regions / m;
            if previous[region] != Some(word) {
                bag.add(WordKey::unigram(word, level, region), weight);
            }
            previous[region] = Some(word);
        }
    }
    if use_bigrams {
        let w = sequence.window_length;
        for j in w..sequence.words.len() {
            bag.add(
                WordKey::bigram(sequence.words[j - w], sequence.words[j], 1, 0),
                1,
            );
        }
    }
    bag
}

/// Fit a transform on the training data and build one classifier.
pub fn build_individual(train: &Dataset, config: &IndividualConfig) -> Result<IndividualBoss> {
    let (transform, sequences) =
        SfaTransform::fit(train.all_series(), train.labels(), config.sfa)?;
    let train_bags: Vec<Bag> = sequences
        .iter()
        .map(|seq| pyramid_bags(seq, config.pyramid_height, config.use_bigrams))
        .collect();
    let mut individual = IndividualBoss {
        config: *config,
        transform,
        train_bags,
        train_labels: train.labels().to_vec(),
        train_accuracy: 0.0,
        series_length: train.series_length(),
    };
    individual.train_accuracy = individual.loocv_accuracy();
    Ok(individual)
}

impl IndividualBoss {
    fn bag_for(&self, series: &[f64]) -> Result<Bag> {
        let sequence = self.transform.word_sequence(series)?;
        Ok(pyramid_bags(
            &sequence,
            self.config.pyramid_height,
            self.config.use_bigrams,
        ))
    }

    /// Index of the nearest training bag under the configured measure,
    /// ties broken by the lowest training index.
    fn nearest(&self, query: &Bag, skip: Option<usize>) -> Option<usize> {
        let mut best: Option<(usize, u64)> = None;
        for (i, train_bag) in self.train_bags.iter().enumerate() {
            if skip == Some(i) {
                continue;
            }
            let score = match self.config.distance {
                DistanceMeasure::BossDistance => boss_distance(query, train_bag),
                DistanceMeasure::HistogramIntersection => histogram_intersection(query, train_bag),
            };
            let better = match (self.config.distance, best) {
                (_, None) => true,
                (DistanceMeasure::BossDistance, Some((_, b))) => score < b,
                (DistanceMeasure::HistogramIntersection, Some((_, b))) => score > b,
            };
            if better {
                best = Some((i, score));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Classify a series by 1-NN over the training bags.
    pub fn predict_1nn(&self, series: &[f64]) -> Result<usize> {
        if series.len() != self.series_length {
            return Err(Error::SeriesLengthMismatch {
                expected: self.series_length,
                found: series.len(),
            });
        }
        let query = self.bag_for(series)?;
        let idx = self
            .nearest(&query, None)
            .expect("training set is never empty");
        Ok(self.train_labels[idx])
    }

    /// Leave-one-out 1-NN accuracy over the training bags. A single-case
    /// training set has no neighbour and scores 0.
    pub fn loocv_accuracy(&self) -> f64 {
        let n = self.train_bags.len();
        if n < 2 {
            return 0.0;
        }
        let mut correct = 0usize;
        for i in 0..n {
            let neighbour = self
                .nearest(&self.train_bags[i], Some(i))
                .expect("n >= 2 leaves a neighbour");
            if self.train_labels[neighbour] == self.train_labels[i] {
                correct += 1;
            }
        }
        correct as f64 / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfa::{Binning, PackedWord};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn bag(entries: &[(u32, u32)]) -> Bag {
        entries
            .iter()
            .map(|&(letters, count)| {
                (
                    WordKey::unigram(PackedWord::from_letters(&[(letters % 4) as usize, (letters / 4 % 4) as usize]), 1, 0),
                    count,
                )
            })
            .collect()
    }

    #[test]
    fn boss_distance_identity_and_asymmetry() {
        let x = bag(&[(0, 2)]);
        let y = bag(&[(0, 2), (1, 7)]);
        assert_eq!(boss_distance(&x, &x), 0);
        assert_eq!(boss_distance(&y, &y), 0);
        // Words absent from the query are ignored.
        assert_eq!(boss_distance(&x, &y), 0);
        assert_eq!(boss_distance(&y, &x), 49);
    }

    #[test]
    fn boss_distance_hand_example() {
        let test = bag(&[(0, 1), (1, 1)]);
        let train = bag(&[(0, 3)]);
        assert_eq!(boss_distance(&test, &train), 5);
        assert_eq!(boss_distance(&train, &test), 4);
    }

    #[test]
    fn histogram_intersection_examples() {
        let a = bag(&[(0, 3), (1, 1)]);
        let b = bag(&[(0, 1), (2, 5)]);
        assert_eq!(histogram_intersection(&a, &b), 1);
        assert_eq!(histogram_intersection(&b, &a), 1);
        assert_eq!(histogram_intersection(&a, &a), a.total());
        let disjoint = bag(&[(3, 9)]);
        assert_eq!(histogram_intersection(&a, &disjoint), 0);
    }

    #[test]
    fn histogram_intersection_bounded_by_totals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a: Bag = (0..rng.gen_range(1..8))
                .map(|_| {
                    (
                        WordKey::unigram(PackedWord::from_letters(&[rng.gen_range(0..4)]), 1, 0),
                        rng.gen_range(1..6),
                    )
                })
                .collect();
            let b: Bag = (0..rng.gen_range(1..8))
                .map(|_| {
                    (
                        WordKey::unigram(PackedWord::from_letters(&[rng.gen_range(0..4)]), 1, 0),
                        rng.gen_range(1..6),
                    )
                })
                .collect();
            let sim = histogram_intersection(&a, &b);
            assert!(sim <= a.total().min(b.total()));
        }
    }

    fn word_seq(words: &[u32], w: usize, m: usize) -> WordSequence {
        WordSequence {
            words: words
                .iter()
                .map(|&v| PackedWord::from_letters(&[(v % 4) as usize, (v / 4 % 4) as usize]))
                .collect(),
            window_length: w,
            series_length: m,
        }
    }

    #[test]
    fn pyramid_height_one_is_plain_bag() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let m = rng.gen_range(8..30);
            let w = rng.gen_range(2..5);
            let words: Vec<u32> = (0..=(m - w) as u32).map(|_| rng.gen_range(0..16)).collect();
            let seq = word_seq(&words, w, m);
            for &bigrams in &[false, true] {
                assert_eq!(pyramid_bags(&seq, 1, bigrams), seq.bag(bigrams));
            }
        }
    }

    #[test]
    fn region_assignment_by_start_index() {
        // m=12, w=4: nine windows. The window starting at 7 is in the second
        // half at level 2 (7 >= 12/2).
        let words: Vec<u32> = (0..9).collect();
        let seq = word_seq(&words, 4, 12);
        let bag = pyramid_bags(&seq, 2, false);
        let word7 = seq.words[7];
        assert_eq!(bag.count(&WordKey::unigram(word7, 2, 1)), 2); // level-2 weight
        assert_eq!(bag.count(&WordKey::unigram(word7, 2, 0)), 0);
    }

    #[test]
    fn discriminative_word_tagged_to_its_region() {
        // A word occurring only in the first half never appears with a
        // second-half region tag.
        let rare = 15u32;
        let mut words = vec![1u32; 20];
        words[3] = rare;
        let seq = word_seq(&words, 3, 22);
        let bag = pyramid_bags(&seq, 2, false);
        let rare_word = seq.words[3];
        assert!(bag.count(&WordKey::unigram(rare_word, 2, 0)) > 0);
        assert_eq!(bag.count(&WordKey::unigram(rare_word, 2, 1)), 0);
    }

    #[test]
    fn every_window_in_exactly_one_region_per_level() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = rng.gen_range(10..40);
            let w = rng.gen_range(2..6);
            let n_words = m - w + 1;
            let words: Vec<u32> = (0..n_words).map(|_| rng.gen_range(0..16) as u32).collect();
            let seq = word_seq(&words, w, m);
            for level in 1..=3usize {
                let regions = 1usize << (level - 1);
                let mut assigned = vec![0usize; n_words];
                for (start, _) in seq.words.iter().enumerate() {
                    let r = start * regions / m;
                    assert!(r < regions);
                    assigned[start] += 1;
                }
                assert!(assigned.iter().all(|&c| c == 1));
            }
            // Unweighted level counts equal runs within each region.
            let bag = pyramid_bags(&seq, 3, false);
            for level in 1..=3usize {
                let regions = 1usize << (level - 1);
                let weight = (1u32 << (level - 1)) as u64;
                let level_total: u64 = bag
                    .iter()
                    .filter(|(k, _)| !k.is_bigram() && k.level() == level)
                    .map(|(_, &c)| c as u64)
                    .sum();
                let mut runs = 0u64;
                for region in 0..regions {
                    let mut prev = None;
                    for (start, &word) in seq.words.iter().enumerate() {
                        if start * regions / m == region {
                            if prev != Some(word) {
                                runs += 1;
                            }
                            prev = Some(word);
                        }
                    }
                }
                assert_eq!(level_total, runs * weight);
            }
        }
    }

    fn toy_dataset() -> Dataset {
        // Two smooth classes: ascending vs oscillating.
        let mut series = Vec::new();
        let mut labels = Vec::new();
        for i in 0..4 {
            let phase = i as f64 * 0.2;
            series.push((0..20).map(|t| (t as f64 * 0.3 + phase).sin()).collect());
            labels.push("sine".to_string());
            series.push((0..20).map(|t| t as f64 * 0.1 + phase).collect());
            labels.push("ramp".to_string());
        }
        Dataset::from_parts("toy", series, labels).unwrap()
    }

    fn toy_config() -> IndividualConfig {
        IndividualConfig {
            sfa: SfaParameters::new(4, 4, 8, true, Binning::Mcb).unwrap(),
            pyramid_height: 1,
            use_bigrams: false,
            distance: DistanceMeasure::BossDistance,
        }
    }

    #[test]
    fn training_case_is_its_own_nearest_neighbour() {
        let data = toy_dataset();
        let cls = build_individual(&data, &toy_config()).unwrap();
        for i in 0..data.n_cases() {
            assert_eq!(cls.predict_1nn(data.series(i)).unwrap(), data.label(i));
        }
    }

    #[test]
    fn equidistant_tie_takes_lower_index() {
        let data = toy_dataset();
        let mut cls = build_individual(&data, &toy_config()).unwrap();
        // Force two identical bags with different labels at the front.
        cls.train_bags[1] = cls.train_bags[0].clone();
        cls.train_labels[0] = 0;
        cls.train_labels[1] = 1;
        let query = data.series(0);
        assert_eq!(cls.predict_1nn(query).unwrap(), 0);
    }

    #[test]
    fn length_mismatch_rejected() {
        let data = toy_dataset();
        let cls = build_individual(&data, &toy_config()).unwrap();
        assert!(matches!(
            cls.predict_1nn(&[0.0; 7]),
            Err(Error::SeriesLengthMismatch { expected: 20, found: 7 })
        ));
    }

    #[test]
    fn loocv_degenerate_cases() {
        let one = Dataset::from_parts(
            "one",
            vec![vec![1.0; 12]],
            vec!["a".to_string()],
        )
        .unwrap();
        let cls = build_individual(&one, &toy_config()).unwrap();
        assert_eq!(cls.train_accuracy, 0.0);

        // All cases the same class: every neighbour is correct.
        let same = Dataset::from_parts(
            "same",
            vec![vec![1.0; 12], vec![2.0; 12], vec![3.0; 12]],
            vec!["a".into(), "a".into(), "a".into()],
        )
        .unwrap();
        let cls = build_individual(&same, &toy_config()).unwrap();
        assert_eq!(cls.train_accuracy, 1.0);

        // Two identical series with different labels: both misclassified.
        let series: Vec<f64> = (0..12).map(|t| (t as f64).sin()).collect();
        let pair = Dataset::from_parts(
            "pair",
            vec![series.clone(), series],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let cls = build_individual(&pair, &toy_config()).unwrap();
        assert_eq!(cls.train_accuracy, 0.0);
    }

    #[test]
    fn loocv_matches_brute_force_enumeration() {
        let data = toy_dataset();
        let cls = build_individual(&data, &toy_config()).unwrap();
        let n = data.n_cases();
        let mut correct = 0;
        for i in 0..n {
            let mut best: Option<(usize, u64)> = None;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = boss_distance(&cls.train_bags[i], &cls.train_bags[j]);
                if best.map_or(true, |(_, b)| d < b) {
                    best = Some((j, d));
                }
            }
            if cls.train_labels[best.unwrap().0] == cls.train_labels[i] {
                correct += 1;
            }
        }
        assert_eq!(cls.train_accuracy, correct as f64 / n as f64);
    }

    #[test]
    fn prediction_verified_against_distance_table() {
        let data = toy_dataset();
        let cls = build_individual(&data, &toy_config()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let query: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..2.0)).collect();
            let bag = cls.bag_for(&query).unwrap();
            let distances: Vec<u64> = cls
                .train_bags
                .iter()
                .map(|t| boss_distance(&bag, t))
                .collect();
            let best = distances
                .iter()
                .enumerate()
                .min_by_key(|&(i, &d)| (d, i))
                .unwrap()
                .0;
            assert_eq!(cls.predict_1nn(&query).unwrap(), cls.train_labels[best]);
        }
    }

    #[test]
    fn build_is_deterministic() {
        let data = toy_dataset();
        let a = build_individual(&data, &toy_config()).unwrap();
        let b = build_individual(&data, &toy_config()).unwrap();
        assert_eq!(a.train_bags, b.train_bags);
        assert_eq!(a.train_accuracy, b.train_accuracy);
    }

    #[test]
    fn prediction_invariant_to_training_permutation() {
        let data = toy_dataset();
        let cls = build_individual(&data, &toy_config()).unwrap();
        let mut permuted = cls.clone();
        permuted.train_bags.reverse();
        permuted.train_labels.reverse();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let query: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.5..1.5)).collect();
            // With distinct distances the argmin label is permutation
            // invariant; skip the rare exact-tie draws.
            let bag = cls.bag_for(&query).unwrap();
            let mut distances: Vec<u64> = cls
                .train_bags
                .iter()
                .map(|t| boss_distance(&bag, t))
                .collect();
            distances.sort_unstable();
            if distances.windows(2).any(|p| p[0] == p[1]) {
                continue;
            }
            assert_eq!(
                cls.predict_1nn(&query).unwrap(),
                permuted.predict_1nn(&query).unwrap()
            );
        }
    }
}
