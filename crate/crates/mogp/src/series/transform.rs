//! Invertible value transforms: linear detrend and natural log.
//!
//! Trend lines are fit on training-masked points only so held-out points
//! never leak into preprocessing. Every transform appends a record that
//! suffices to reconstruct the original values.

use crate::error::{Error, Result};
use crate::series::{Channel, Observation, TimeSeriesSet, TransformRecord};

/// Subtracts the least-squares line fit on the given training indices.
pub fn detrend_linear(ch: &Channel, train_indices: &[usize]) -> Result<Channel> {
    if train_indices.len() < 2 {
        return Err(Error::InsufficientData {
            channel: ch.name().to_string(),
            needed: 2,
            found: train_indices.len(),
        });
    }
    let obs = ch.observations();
    let n = train_indices.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &i in train_indices {
        let Observation { t, y } = obs[i];
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let denom = n * stt - st * st;
    if denom.abs() < f64::EPSILON * n * stt.max(1.0) {
        return Err(Error::InsufficientData {
            channel: ch.name().to_string(),
            needed: 2,
            found: 1,
        });
    }
    let slope = (n * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / n;

    let detrended = obs
        .iter()
        .map(|o| Observation {
            t: o.t,
            y: o.y - (slope * o.t + intercept),
        })
        .collect();
    let mut log = ch.transform_log().to_vec();
    log.push(TransformRecord::DetrendLinear { slope, intercept });
    Channel::with_transforms(ch.name().to_string(), detrended, log)
}

/// Applies `y -> ln(y)`; every value must be strictly positive.
pub fn log_transform(ch: &Channel) -> Result<Channel> {
    for o in ch.observations() {
        if o.y <= 0.0 {
            return Err(Error::LogDomain {
                channel: ch.name().to_string(),
                t: o.t,
                value: o.y,
            });
        }
    }
    let logged = ch
        .observations()
        .iter()
        .map(|o| Observation {
            t: o.t,
            y: o.y.ln(),
        })
        .collect();
    let mut log = ch.transform_log().to_vec();
    log.push(TransformRecord::Log);
    Channel::with_transforms(ch.name().to_string(), logged, log)
}

/// Inverts a single transformed value at time `t` through a transform log
/// (applied newest-first).
pub fn inverse_transform_value(y: f64, t: f64, transforms: &[TransformRecord]) -> f64 {
    let mut v = y;
    for rec in transforms.iter().rev() {
        v = match rec {
            TransformRecord::DetrendLinear { slope, intercept } => v + slope * t + intercept,
            TransformRecord::Log => v.exp(),
        };
    }
    v
}

/// Reconstructs the original channel by undoing its whole transform log.
pub fn undo_transforms(ch: &Channel) -> Result<Channel> {
    let restored = ch
        .observations()
        .iter()
        .map(|o| Observation {
            t: o.t,
            y: inverse_transform_value(o.y, o.t, ch.transform_log()),
        })
        .collect();
    Channel::new(ch.name().to_string(), restored)
}

/// Applies a named transform to every channel of a set, fitting on each
/// channel's training mask.
pub fn apply_named_transform(ts: &TimeSeriesSet, name: &str) -> Result<TimeSeriesSet> {
    let mut out = ts.clone();
    for idx in 0..ts.num_channels() {
        let ch = out.channel(idx).clone();
        let transformed = match name {
            "log" => log_transform(&ch)?,
            "detrend" | "detrend-linear" => detrend_linear(&ch, out.train_indices(idx))?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown transform '{other}' (expected 'log' or 'detrend')"
                )))
            }
        };
        out = out.replace_channel(idx, transformed);
    }
    Ok(out)
}
