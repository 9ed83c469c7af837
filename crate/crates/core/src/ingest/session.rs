//! In-memory representation of one recorded (or synthesised) session.

use crate::error::{Error, Result};
use crate::ingest::label::{validate_intervals, LabelInterval};

/// One agent's recording for one day: the three sensor streams, a validity
/// mask, and the label timeline. All channels are sampled on the same uniform
/// clock; sample `i` sits at `i / sample_rate_hz` seconds.
///
/// Channels never contain NaN. Samples the hardware lost are kept in place
/// (value 0 by convention) and flagged `false` in `valid`.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionData {
    pub agent_id: String,
    /// Recording group this agent belongs to (1-based).
    pub group_id: u32,
    /// Recording day (1-based).
    pub day_index: u32,
    pub sample_rate_hz: f64,
    /// Body-surface potential, millivolts.
    pub potential_mv: Vec<f64>,
    /// Wrist accelerometer, g per axis.
    pub accel_wrist: Vec<[f64; 3]>,
    /// Calf accelerometer, g per axis.
    pub accel_calf: Vec<[f64; 3]>,
    /// Per-sample validity mask; `false` marks data loss.
    pub valid: Vec<bool>,
    /// Annotation intervals, sorted by start, non-overlapping.
    pub labels: Vec<LabelInterval>,
}

impl SessionData {
    pub fn n_samples(&self) -> usize {
        self.potential_mv.len()
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.sample_rate_hz
    }

    /// Identity used in file names and fold bookkeeping.
    pub fn session_id(&self) -> String {
        format!("g{}d{}_{}", self.group_id, self.day_index, self.agent_id)
    }

    /// Structural checks; returns every violation found.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.agent_id.is_empty() {
            problems.push("agent_id is empty".to_string());
        }
        if self.group_id == 0 {
            problems.push("group_id must be >= 1".to_string());
        }
        if self.day_index == 0 {
            problems.push("day_index must be >= 1".to_string());
        }
        if !self.sample_rate_hz.is_finite() || self.sample_rate_hz <= 0.0 {
            problems.push(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            ));
        }
        let n = self.potential_mv.len();
        for (name, len) in [
            ("accel_wrist", self.accel_wrist.len()),
            ("accel_calf", self.accel_calf.len()),
            ("valid", self.valid.len()),
        ] {
            if len != n {
                problems.push(format!(
                    "channel length mismatch: potential_mv has {n} samples, {name} has {len}"
                ));
            }
        }
        if self.potential_mv.iter().any(|v| !v.is_finite()) {
            problems.push("potential_mv contains non-finite samples".to_string());
        }
        for (name, accel) in [("accel_wrist", &self.accel_wrist), ("accel_calf", &self.accel_calf)]
        {
            if accel.iter().flatten().any(|v| !v.is_finite()) {
                problems.push(format!("{name} contains non-finite samples"));
            }
        }
        problems.extend(validate_intervals(&self.labels));
        let duration = n as f64 / self.sample_rate_hz;
        if let Some(last) = self.labels.last() {
            if last.end_s > duration + 1e-9 {
                problems.push(format!(
                    "label interval ends at {}s but the session lasts {duration}s",
                    last.end_s
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}
