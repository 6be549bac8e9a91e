//! Multi-channel time series storage: loading, transforms, masking and
//! JSON persistence.
//!
//! A [`TimeSeriesSet`] holds `M` named channels of irregularly sampled
//! observations together with per-channel train/test index masks. All types
//! are immutable after construction; operations return new values.

mod load;
mod mask;
mod transform;

pub use load::{load_csv, CsvSchema};
pub use mask::{apply_mask, MaskReport, MaskSpec};
pub use transform::{
    apply_named_transform, detrend_linear, inverse_transform_value, log_transform, undo_transforms,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single observation: time in real-valued days, value in channel units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub t: f64,
    pub y: f64,
}

/// A record of an applied, invertible value transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TransformRecord {
    /// Least-squares line `slope * t + intercept` that was subtracted.
    DetrendLinear { slope: f64, intercept: f64 },
    /// Natural log was applied to all values.
    Log,
}

/// One named output channel with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    name: String,
    observations: Vec<Observation>,
    transform_log: Vec<TransformRecord>,
}

impl Channel {
    /// Builds a channel, validating finiteness and strict time ordering.
    pub fn new(name: impl Into<String>, observations: Vec<Observation>) -> Result<Self> {
        let name = name.into();
        for obs in &observations {
            if !obs.t.is_finite() || !obs.y.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "channel '{name}': non-finite observation (t={}, y={})",
                    obs.t, obs.y
                )));
            }
        }
        for pair in observations.windows(2) {
            if pair[1].t <= pair[0].t {
                return Err(Error::InvalidParameter(format!(
                    "channel '{name}': timestamps must be strictly increasing (t={} then t={})",
                    pair[0].t, pair[1].t
                )));
            }
        }
        Ok(Self {
            name,
            observations,
            transform_log: Vec::new(),
        })
    }

    pub(crate) fn with_transforms(
        name: String,
        observations: Vec<Observation>,
        transform_log: Vec<TransformRecord>,
    ) -> Result<Self> {
        let mut ch = Self::new(name, observations)?;
        ch.transform_log = transform_log;
        Ok(ch)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().map(|o| o.t)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().map(|o| o.y)
    }

    /// Transforms applied so far, oldest first.
    pub fn transform_log(&self) -> &[TransformRecord] {
        &self.transform_log
    }
}

/// M named channels plus disjoint train/test index masks per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSet {
    channels: Vec<Channel>,
    train_mask: Vec<Vec<usize>>,
    test_mask: Vec<Vec<usize>>,
    mask_seed: Option<u64>,
}

impl TimeSeriesSet {
    /// Builds a set with all observations in the train mask.
    pub fn new(channels: Vec<Channel>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for ch in &channels {
            if !seen.insert(ch.name().to_string()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate channel name '{}'",
                    ch.name()
                )));
            }
        }
        let train_mask = channels.iter().map(|c| (0..c.len()).collect()).collect();
        let test_mask = channels.iter().map(|_| Vec::new()).collect();
        Ok(Self {
            channels,
            train_mask,
            test_mask,
            mask_seed: None,
        })
    }

    pub(crate) fn with_masks(
        channels: Vec<Channel>,
        train_mask: Vec<Vec<usize>>,
        test_mask: Vec<Vec<usize>>,
        mask_seed: Option<u64>,
    ) -> Result<Self> {
        if train_mask.len() != channels.len() || test_mask.len() != channels.len() {
            return Err(Error::DimensionMismatch(
                "mask arrays must have one entry per channel".into(),
            ));
        }
        for (idx, ch) in channels.iter().enumerate() {
            let mut union: Vec<usize> = train_mask[idx]
                .iter()
                .chain(test_mask[idx].iter())
                .copied()
                .collect();
            union.sort_unstable();
            let expected: Vec<usize> = (0..ch.len()).collect();
            if union != expected {
                return Err(Error::InvalidMask(format!(
                    "channel '{}': train and test masks must partition all {} indices",
                    ch.name(),
                    ch.len()
                )));
            }
        }
        let set = Self {
            channels,
            train_mask,
            test_mask,
            mask_seed,
        };
        Ok(set)
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, idx: usize) -> &Channel {
        &self.channels[idx]
    }

    pub fn channel_index(&self, name: &str) -> Result<usize> {
        self.channels
            .iter()
            .position(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    /// Sorted training indices for a channel.
    pub fn train_indices(&self, ch: usize) -> &[usize] {
        &self.train_mask[ch]
    }

    /// Sorted held-out indices for a channel.
    pub fn test_indices(&self, ch: usize) -> &[usize] {
        &self.test_mask[ch]
    }

    pub fn mask_seed(&self) -> Option<u64> {
        self.mask_seed
    }

    /// Training observations of one channel, in time order.
    pub fn train_observations(&self, ch: usize) -> impl Iterator<Item = Observation> + '_ {
        self.train_mask[ch]
            .iter()
            .map(move |&i| self.channels[ch].observations()[i])
    }

    /// Held-out observations of one channel, in time order.
    pub fn test_observations(&self, ch: usize) -> impl Iterator<Item = Observation> + '_ {
        self.test_mask[ch]
            .iter()
            .map(move |&i| self.channels[ch].observations()[i])
    }

    /// Flattened training inputs as (channel, t) pairs with their values.
    pub fn train_inputs(&self) -> (Vec<(usize, f64)>, Vec<f64>) {
        let mut inputs = Vec::new();
        let mut values = Vec::new();
        for ch in 0..self.num_channels() {
            for obs in self.train_observations(ch) {
                inputs.push((ch, obs.t));
                values.push(obs.y);
            }
        }
        (inputs, values)
    }

    pub fn total_train_points(&self) -> usize {
        self.train_mask.iter().map(Vec::len).sum()
    }

    pub fn total_test_points(&self) -> usize {
        self.test_mask.iter().map(Vec::len).sum()
    }

    /// Replaces one channel, keeping masks (used by value transforms).
    pub(crate) fn replace_channel(&self, idx: usize, ch: Channel) -> Self {
        let mut channels = self.channels.clone();
        channels[idx] = ch;
        Self {
            channels,
            train_mask: self.train_mask.clone(),
            test_mask: self.test_mask.clone(),
            mask_seed: self.mask_seed,
        }
    }

    /// Serializes to the persistence document format.
    pub fn to_json(&self) -> Result<String> {
        let doc = SeriesDoc {
            channels: self
                .channels
                .iter()
                .map(|c| ChannelDoc {
                    name: c.name().to_string(),
                    t: c.times().collect(),
                    y: c.values().collect(),
                    transforms: c.transform_log().to_vec(),
                })
                .collect(),
            train_mask: self.train_mask.clone(),
            test_mask: self.test_mask.clone(),
            seed: self.mask_seed,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SeriesDoc = serde_json::from_str(text)?;
        let mut channels = Vec::with_capacity(doc.channels.len());
        for ch in doc.channels {
            if ch.t.len() != ch.y.len() {
                return Err(Error::DimensionMismatch(format!(
                    "channel '{}': t and y lengths differ",
                    ch.name
                )));
            }
            let obs = ch
                .t
                .iter()
                .zip(ch.y.iter())
                .map(|(&t, &y)| Observation { t, y })
                .collect();
            channels.push(Channel::with_transforms(ch.name, obs, ch.transforms)?);
        }
        let mut seen = std::collections::BTreeSet::new();
        for ch in &channels {
            if !seen.insert(ch.name().to_string()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate channel name '{}'",
                    ch.name()
                )));
            }
        }
        Self::with_masks(channels, doc.train_mask, doc.test_mask, doc.seed)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    channels: Vec<ChannelDoc>,
    train_mask: Vec<Vec<usize>>,
    test_mask: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct ChannelDoc {
    name: String,
    t: Vec<f64>,
    y: Vec<f64>,
    transforms: Vec<TransformRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(pairs: &[(f64, f64)]) -> Vec<Observation> {
        pairs.iter().map(|&(t, y)| Observation { t, y }).collect()
    }

    #[test]
    fn channel_rejects_unordered_times() {
        let err = Channel::new("a", obs(&[(0.0, 1.0), (0.0, 2.0)])).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn channel_rejects_non_finite() {
        assert!(Channel::new("a", obs(&[(0.0, f64::NAN)])).is_err());
        assert!(Channel::new("a", obs(&[(f64::INFINITY, 1.0)])).is_err());
    }

    #[test]
    fn set_rejects_duplicate_names() {
        let a = Channel::new("x", obs(&[(0.0, 1.0)])).unwrap();
        let b = Channel::new("x", obs(&[(0.0, 2.0)])).unwrap();
        assert!(TimeSeriesSet::new(vec![a, b]).is_err());
    }

    #[test]
    fn new_set_puts_everything_in_train() {
        let a = Channel::new("x", obs(&[(0.0, 1.0), (1.0, 2.0)])).unwrap();
        let ts = TimeSeriesSet::new(vec![a]).unwrap();
        assert_eq!(ts.train_indices(0), &[0, 1]);
        assert!(ts.test_indices(0).is_empty());
    }

    #[test]
    fn json_round_trip() {
        let a = Channel::new("gold", obs(&[(0.0, 1.0), (7.0, 2.0), (14.0, 3.0)])).unwrap();
        let b = Channel::new("oil", obs(&[(0.0, 4.0), (7.0, 5.0)])).unwrap();
        let ts = TimeSeriesSet::with_masks(
            vec![a, b],
            vec![vec![0, 2], vec![1]],
            vec![vec![1], vec![0]],
            Some(42),
        )
        .unwrap();
        let text = ts.to_json().unwrap();
        let back = TimeSeriesSet::from_json(&text).unwrap();
        assert_eq!(ts, back);
    }

    #[test]
    fn masks_must_partition() {
        let a = Channel::new("x", obs(&[(0.0, 1.0), (1.0, 2.0)])).unwrap();
        let err =
            TimeSeriesSet::with_masks(vec![a], vec![vec![0]], vec![vec![0]], None).unwrap_err();
        assert!(matches!(err, Error::InvalidMask(_)));
    }
}
