//! Per-session channel derivation.
//!
//! Raw recordings carry an absolute potential trace and two 3-axis
//! accelerometer traces. Downstream stages work on three scalar channels:
//!
//! * `e_wrist` — first difference of the potential in mV per sample,
//!   clipped to a configurable band so grab/release spikes cannot swamp
//!   the gait modulation. Which samples hit the clip is kept as a flag
//!   vector, because the clipped fraction is itself informative.
//! * `a_wrist`, `a_calf` — Euclidean norm of the respective accelerometer,
//!   which makes the channel orientation-free.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::SessionData;

/// A scalar channel derived from one sensor placement.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Clipped potential difference at the wrist.
    EWrist,
    /// Acceleration norm at the wrist.
    AWrist,
    /// Acceleration norm at the calf.
    ACalf,
}

impl Source {
    /// All channels in canonical order.
    pub const ALL: [Source; 3] = [Source::EWrist, Source::AWrist, Source::ACalf];

    pub fn token(self) -> &'static str {
        match self {
            Source::EWrist => "e_wrist",
            Source::AWrist => "a_wrist",
            Source::ACalf => "a_calf",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e_wrist" => Ok(Source::EWrist),
            "a_wrist" => Ok(Source::AWrist),
            "a_calf" => Ok(Source::ACalf),
            other => Err(Error::invalid(format!(
                "unknown channel {other:?}; expected e_wrist, a_wrist or a_calf"
            ))),
        }
    }
}

/// Euclidean norm of one accelerometer sample.
pub fn accel_norm(xyz: [f64; 3]) -> f64 {
    (xyz[0] * xyz[0] + xyz[1] * xyz[1] + xyz[2] * xyz[2]).sqrt()
}

/// First difference of a trace, left-padded with zero so the output has the
/// same length as the input.
pub fn potential_delta(trace: &[f64]) -> Result<Vec<f64>> {
    if trace.len() < 2 {
        return Err(Error::invalid(format!(
            "potential_delta needs at least 2 samples, got {}",
            trace.len()
        )));
    }
    let mut out = Vec::with_capacity(trace.len());
    out.push(0.0);
    for pair in trace.windows(2) {
        out.push(pair[1] - pair[0]);
    }
    Ok(out)
}

/// Clamps a difference into `[-limit, limit]`.
pub fn clip_delta(x: f64, limit: f64) -> f64 {
    x.clamp(-limit, limit)
}

/// The derived scalar channels of one session, sample-aligned with the raw
/// recording.
#[derive(Debug, Clone)]
pub struct SessionChannels {
    pub channels: BTreeMap<Source, Vec<f64>>,
    /// Per sample: did the raw potential difference exceed the clip band?
    pub e_clipped: Vec<bool>,
}

impl SessionChannels {
    pub fn from_session(session: &SessionData, clip_mv: f64) -> Result<SessionChannels> {
        if !(clip_mv > 0.0 && clip_mv.is_finite()) {
            return Err(Error::invalid(format!(
                "clip limit must be positive and finite, got {clip_mv}"
            )));
        }
        let raw = potential_delta(&session.potential_mv)?;
        let e_clipped: Vec<bool> = raw.iter().map(|&d| d.abs() > clip_mv).collect();
        let e_wrist: Vec<f64> = raw.into_iter().map(|d| clip_delta(d, clip_mv)).collect();
        let a_wrist: Vec<f64> = session.accel_wrist.iter().map(|&v| accel_norm(v)).collect();
        let a_calf: Vec<f64> = session.accel_calf.iter().map(|&v| accel_norm(v)).collect();
        let mut channels = BTreeMap::new();
        channels.insert(Source::EWrist, e_wrist);
        channels.insert(Source::AWrist, a_wrist);
        channels.insert(Source::ACalf, a_calf);
        Ok(SessionChannels { channels, e_clipped })
    }
}
