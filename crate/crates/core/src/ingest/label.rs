//! Activity label taxonomy and per-sample label lookup.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Annotation vocabulary for a session. `A1`..`A10` are the activity codes
/// used in label files; the two extra variants cover samples no annotator
/// claimed and samples lost to hardware dropouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LabelClass {
    /// Synchronisation gesture: ten on-site steps at session start/stop.
    A1,
    /// Standing still, doing nothing.
    A2,
    /// Walking normally.
    A3,
    /// Walking while carrying the metal load alone.
    A4,
    /// Walking while carrying the heavy load jointly with a partner.
    A5,
    /// Lifting a load (alone or together, see the interval's joint flag).
    A6,
    /// Setting a load down (alone or together).
    A7,
    /// Fastening screws.
    A8,
    /// Activity outside the vocabulary (drinking, chatting, ...).
    A9,
    /// Subject out of camera view; ground truth unavailable.
    A10,
    /// No label interval covers the sample.
    Unlabeled,
    /// Sample invalidated by the recording hardware.
    DataLoss,
}

impl LabelClass {
    /// Classes that may legally carry `joint = true` in a label interval.
    pub fn can_be_joint(self) -> bool {
        matches!(self, LabelClass::A5 | LabelClass::A6 | LabelClass::A7)
    }

    /// Classes that are joint by definition.
    pub fn always_joint(self) -> bool {
        self == LabelClass::A5
    }

    pub fn description(self) -> &'static str {
        match self {
            LabelClass::A1 => "start/stop sync steps",
            LabelClass::A2 => "stand still",
            LabelClass::A3 => "walk",
            LabelClass::A4 => "carry alone",
            LabelClass::A5 => "carry jointly",
            LabelClass::A6 => "lift",
            LabelClass::A7 => "drop",
            LabelClass::A8 => "turn screw",
            LabelClass::A9 => "undefined activity",
            LabelClass::A10 => "out of camera",
            LabelClass::Unlabeled => "unlabeled",
            LabelClass::DataLoss => "data loss",
        }
    }
}

impl fmt::Display for LabelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            LabelClass::A1 => "A1",
            LabelClass::A2 => "A2",
            LabelClass::A3 => "A3",
            LabelClass::A4 => "A4",
            LabelClass::A5 => "A5",
            LabelClass::A6 => "A6",
            LabelClass::A7 => "A7",
            LabelClass::A8 => "A8",
            LabelClass::A9 => "A9",
            LabelClass::A10 => "A10",
            LabelClass::Unlabeled => "UNLABELED",
            LabelClass::DataLoss => "DATA_LOSS",
        };
        f.write_str(token)
    }
}

impl FromStr for LabelClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "A1" => LabelClass::A1,
            "A2" => LabelClass::A2,
            "A3" => LabelClass::A3,
            "A4" => LabelClass::A4,
            "A5" => LabelClass::A5,
            "A6" => LabelClass::A6,
            "A7" => LabelClass::A7,
            "A8" => LabelClass::A8,
            "A9" => LabelClass::A9,
            "A10" => LabelClass::A10,
            "UNLABELED" => LabelClass::Unlabeled,
            "DATA_LOSS" => LabelClass::DataLoss,
            other => {
                return Err(Error::invalid(format!("unknown label class {other:?}")));
            }
        })
    }
}

/// One annotated stretch of a session. The interval is half-open:
/// `start_s <= t < end_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelInterval {
    pub start_s: f64,
    pub end_s: f64,
    pub class: LabelClass,
    /// True when the activity was performed together with `partner`.
    pub joint: bool,
    /// Identifier of the cooperating agent; present exactly when `joint`.
    pub partner: Option<String>,
}

impl LabelInterval {
    pub fn solo(start_s: f64, end_s: f64, class: LabelClass) -> Self {
        LabelInterval {
            start_s,
            end_s,
            class,
            joint: false,
            partner: None,
        }
    }

    pub fn joint(start_s: f64, end_s: f64, class: LabelClass, partner: impl Into<String>) -> Self {
        LabelInterval {
            start_s,
            end_s,
            class,
            joint: true,
            partner: Some(partner.into()),
        }
    }

    pub fn contains(&self, t_s: f64) -> bool {
        self.start_s <= t_s && t_s < self.end_s
    }

    fn describe(&self) -> String {
        format!("[{}, {}) {}", self.start_s, self.end_s, self.class)
    }
}

/// Checks interval list structure: each interval well-formed, the list sorted
/// by start and free of overlaps. Returns one message per violation.
pub fn validate_intervals(labels: &[LabelInterval]) -> Vec<String> {
    let mut problems = Vec::new();
    for (i, interval) in labels.iter().enumerate() {
        if !interval.start_s.is_finite() || !interval.end_s.is_finite() {
            problems.push(format!("interval {i} {} has non-finite bounds", interval.describe()));
            continue;
        }
        if interval.start_s < 0.0 {
            problems.push(format!("interval {i} {} starts before 0", interval.describe()));
        }
        if interval.start_s >= interval.end_s {
            problems.push(format!("interval {i} {} is empty or reversed", interval.describe()));
        }
        if interval.joint != interval.partner.is_some() {
            problems.push(format!(
                "interval {i} {}: joint flag and partner must agree",
                interval.describe()
            ));
        }
        if interval.joint && !interval.class.can_be_joint() {
            problems.push(format!(
                "interval {i} {}: class {} cannot be joint",
                interval.describe(),
                interval.class
            ));
        }
        if interval.class.always_joint() && !interval.joint {
            problems.push(format!(
                "interval {i} {}: class {} requires a partner",
                interval.describe(),
                interval.class
            ));
        }
        if matches!(interval.class, LabelClass::Unlabeled | LabelClass::DataLoss) {
            problems.push(format!(
                "interval {i} {}: {} is implicit and may not appear in label lists",
                interval.describe(),
                interval.class
            ));
        }
    }
    for pair in labels.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.start_s < a.start_s {
            problems.push(format!(
                "intervals out of order: {} before {}",
                a.describe(),
                b.describe()
            ));
        } else if b.start_s < a.end_s {
            problems.push(format!(
                "overlapping intervals: {} and {}",
                a.describe(),
                b.describe()
            ));
        }
    }
    problems
}

/// Label a single instant. Expects `labels` sorted and non-overlapping (see
/// [`validate_intervals`]); gaps resolve to [`LabelClass::Unlabeled`].
pub fn label_at(labels: &[LabelInterval], t_s: f64) -> (LabelClass, bool, Option<&str>) {
    // index of the first interval starting strictly after t, then step back
    let next = labels.partition_point(|l| l.start_s <= t_s);
    if next > 0 {
        let candidate = &labels[next - 1];
        if candidate.contains(t_s) {
            return (candidate.class, candidate.joint, candidate.partner.as_deref());
        }
    }
    (LabelClass::Unlabeled, false, None)
}
