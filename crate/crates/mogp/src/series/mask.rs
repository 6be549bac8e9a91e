//! Experiment masking: moves observations into the held-out test mask by
//! removal ranges and seeded random draws.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeriesSet;

/// Masking instructions for one experiment.
///
/// Channels absent from the maps keep all observations in the train mask.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MaskSpec {
    /// Fraction of each channel's observations removed at random, in [0,1].
    #[serde(default)]
    pub random_fraction: BTreeMap<String, f64>,
    /// Per-channel `[t_start, t_end]` removal intervals (inclusive).
    #[serde(default)]
    pub ranges: BTreeMap<String, Vec<(f64, f64)>>,
    /// Seed driving the random removal.
    pub seed: u64,
}

impl MaskSpec {
    /// Same random fraction for every channel, no range removal.
    pub fn uniform(ts: &TimeSeriesSet, fraction: f64, seed: u64) -> Self {
        let random_fraction = ts
            .channels()
            .iter()
            .map(|c| (c.name().to_string(), fraction))
            .collect();
        Self {
            random_fraction,
            ranges: BTreeMap::new(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, f) in &self.random_fraction {
            if !(0.0..=1.0).contains(f) {
                return Err(Error::InvalidMask(format!(
                    "channel '{name}': random fraction {f} outside [0,1]"
                )));
            }
        }
        for (name, ranges) in &self.ranges {
            for &(start, end) in ranges {
                if !(start < end) {
                    return Err(Error::InvalidMask(format!(
                        "channel '{name}': range [{start}, {end}] must have t_start < t_end"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outcome notes from a masking operation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MaskReport {
    pub warnings: Vec<String>,
}

/// Applies a [`MaskSpec`]: range-removed and randomly removed indices move
/// to the test mask. Deterministic given `(ts, spec)`.
pub fn apply_mask(ts: &TimeSeriesSet, spec: &MaskSpec) -> Result<(TimeSeriesSet, MaskReport)> {
    spec.validate()?;
    let mut report = MaskReport::default();
    let mut train_mask = Vec::with_capacity(ts.num_channels());
    let mut test_mask = Vec::with_capacity(ts.num_channels());

    for (idx, ch) in ts.channels().iter().enumerate() {
        let n = ch.len();
        let mut removed = vec![false; n];

        if let Some(ranges) = spec.ranges.get(ch.name()) {
            for &(start, end) in ranges {
                for (i, obs) in ch.observations().iter().enumerate() {
                    if obs.t >= start && obs.t <= end {
                        removed[i] = true;
                    }
                }
            }
        }

        let fraction = spec
            .random_fraction
            .get(ch.name())
            .copied()
            .unwrap_or(0.0);
        if fraction > 0.0 && n > 0 {
            let count = ((fraction * n as f64).round() as usize).min(n);
            let mut rng = ChaCha8Rng::seed_from_u64(channel_seed(spec.seed, idx));
            let picks = rand::seq::index::sample(&mut rng, n, count);
            for i in picks.iter() {
                removed[i] = true;
            }
        }

        let train: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
        let test: Vec<usize> = (0..n).filter(|&i| removed[i]).collect();
        if train.is_empty() && n > 0 {
            report.warnings.push(format!(
                "channel '{}': no training observations remain after masking",
                ch.name()
            ));
        }
        train_mask.push(train);
        test_mask.push(test);
    }

    let masked = TimeSeriesSet::with_masks(
        ts.channels().to_vec(),
        train_mask,
        test_mask,
        Some(spec.seed),
    )?;
    Ok((masked, report))
}

// SplitMix64 step; gives each channel an independent substream.
fn channel_seed(seed: u64, channel_idx: usize) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(channel_idx as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Channel, Observation};

    fn series(n: usize) -> TimeSeriesSet {
        let obs = (0..n)
            .map(|i| Observation {
                t: i as f64,
                y: (i as f64).sin(),
            })
            .collect();
        TimeSeriesSet::new(vec![Channel::new("c", obs).unwrap()]).unwrap()
    }

    #[test]
    fn empty_spec_keeps_everything_in_train() {
        let ts = series(10);
        let spec = MaskSpec {
            seed: 1,
            ..Default::default()
        };
        let (out, report) = apply_mask(&ts, &spec).unwrap();
        assert_eq!(out.train_indices(0).len(), 10);
        assert!(out.test_indices(0).is_empty());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn range_removal_is_inclusive() {
        let ts = series(21);
        let mut spec = MaskSpec {
            seed: 1,
            ..Default::default()
        };
        spec.ranges.insert("c".into(), vec![(5.0, 10.0)]);
        let (out, _) = apply_mask(&ts, &spec).unwrap();
        assert_eq!(out.test_indices(0), &[5, 6, 7, 8, 9, 10]);
        assert_eq!(out.train_indices(0).len(), 15);
    }

    #[test]
    fn same_seed_same_mask() {
        let ts = series(50);
        let spec = MaskSpec::uniform(&ts, 0.3, 42);
        let (a, _) = apply_mask(&ts, &spec).unwrap();
        let (b, _) = apply_mask(&ts, &spec).unwrap();
        assert_eq!(a.test_indices(0), b.test_indices(0));
        assert_eq!(a.test_indices(0).len(), 15);
    }

    #[test]
    fn different_seeds_differ() {
        let ts = series(100);
        let (a, _) = apply_mask(&ts, &MaskSpec::uniform(&ts, 0.3, 1)).unwrap();
        let (b, _) = apply_mask(&ts, &MaskSpec::uniform(&ts, 0.3, 2)).unwrap();
        assert_ne!(a.test_indices(0), b.test_indices(0));
    }

    #[test]
    fn full_removal_warns() {
        let ts = series(5);
        let spec = MaskSpec::uniform(&ts, 1.0, 7);
        let (out, report) = apply_mask(&ts, &spec).unwrap();
        assert!(out.train_indices(0).is_empty());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn bad_fraction_rejected() {
        let ts = series(5);
        let mut spec = MaskSpec::default();
        spec.random_fraction.insert("c".into(), 1.5);
        assert!(apply_mask(&ts, &spec).is_err());
    }

    #[test]
    fn bad_range_rejected() {
        let ts = series(5);
        let mut spec = MaskSpec::default();
        spec.ranges.insert("c".into(), vec![(3.0, 3.0)]);
        assert!(apply_mask(&ts, &spec).is_err());
    }
}
