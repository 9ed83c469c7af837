//! Sliding-window segmentation with label voting.
//!
//! Sessions are cut into fixed-length windows on a fixed stride. Each window
//! gets one label by majority vote over its samples, a purity score (the
//! majority's share), and possibly a discard reason. Discarded windows stay
//! in the output so callers can report how much material was dropped and why;
//! training and scoring filter them out.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{label_at, LabelClass, SessionData};
use crate::preprocess::channel::{SessionChannels, Source};

/// Windowing parameters, in seconds and millivolts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowParams {
    pub window_s: f64,
    pub step_s: f64,
    /// Clip band for the potential-difference channel.
    pub clip_mv: f64,
}

impl Default for WindowParams {
    fn default() -> Self {
        WindowParams {
            window_s: 5.0,
            step_s: 1.0,
            clip_mv: 3.0,
        }
    }
}

impl WindowParams {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.window_s > 0.0 && self.window_s.is_finite()) {
            problems.push(format!("window_s must be positive, got {}", self.window_s));
        }
        if !(self.step_s > 0.0 && self.step_s.is_finite()) {
            problems.push(format!("step_s must be positive, got {}", self.step_s));
        }
        if !(self.clip_mv > 0.0 && self.clip_mv.is_finite()) {
            problems.push(format!("clip_mv must be positive, got {}", self.clip_mv));
        }
        if self.step_s > self.window_s {
            problems.push(format!(
                "step_s ({}) must not exceed window_s ({})",
                self.step_s, self.window_s
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Why a window is excluded from training and scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    /// Synchronisation stretch at the session edges.
    SyncArtifact,
    /// Activity outside the vocabulary.
    Undefined,
    /// Agent away from the annotated area.
    OutOfCamera,
    /// No annotation covers the majority of the window.
    Unlabeled,
    /// At least one sample in the window was lost.
    DataLoss,
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            DiscardReason::SyncArtifact => "sync_artifact",
            DiscardReason::Undefined => "undefined",
            DiscardReason::OutOfCamera => "out_of_camera",
            DiscardReason::Unlabeled => "unlabeled",
            DiscardReason::DataLoss => "data_loss",
        };
        f.write_str(token)
    }
}

/// The label a window received from the vote.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WindowLabel {
    pub class: LabelClass,
    pub joint: bool,
    pub partner: Option<String>,
}

/// One window: channel slices plus the voted label.
#[derive(Debug, Clone)]
pub struct LabeledWindow {
    pub agent_id: String,
    pub group_id: u32,
    pub day_index: u32,
    pub start_s: f64,
    pub duration_s: f64,
    pub channels: BTreeMap<Source, Vec<f64>>,
    /// Clip flags for the potential-difference channel, window-aligned.
    pub e_clipped: Vec<bool>,
    pub label: WindowLabel,
    /// Fraction of samples that agree with the voted label, in (0, 1].
    pub purity: f64,
    pub discard: Option<DiscardReason>,
}

impl LabeledWindow {
    pub fn is_usable(&self) -> bool {
        self.discard.is_none()
    }
}

fn discard_for(class: LabelClass, any_invalid: bool) -> Option<DiscardReason> {
    if any_invalid {
        return Some(DiscardReason::DataLoss);
    }
    match class {
        LabelClass::A1 => Some(DiscardReason::SyncArtifact),
        LabelClass::A9 => Some(DiscardReason::Undefined),
        LabelClass::A10 => Some(DiscardReason::OutOfCamera),
        LabelClass::Unlabeled => Some(DiscardReason::Unlabeled),
        LabelClass::DataLoss => Some(DiscardReason::DataLoss),
        _ => None,
    }
}

/// Per-sample label identity: class, joint flag, partner.
type LabelTriple = (LabelClass, bool, Option<String>);

/// Majority vote over per-sample `(class, joint, partner)` triples. Ties go
/// to the triple seen earliest in the window. Returns the winning label and
/// its share of the samples.
fn vote(samples: &[LabelTriple]) -> (WindowLabel, f64) {
    // (triple, count, first index seen)
    let mut counts: Vec<(LabelTriple, usize, usize)> = Vec::new();
    for (i, triple) in samples.iter().enumerate() {
        match counts.iter_mut().find(|(t, _, _)| t == triple) {
            Some(entry) => entry.1 += 1,
            None => counts.push((triple.clone(), 1, i)),
        }
    }
    let (triple, n, _) = counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
        .expect("vote over empty window");
    (
        WindowLabel {
            class: triple.0,
            joint: triple.1,
            partner: triple.2,
        },
        n as f64 / samples.len() as f64,
    )
}

/// Cuts `session` into labelled windows. With `n` samples, a window of `w`
/// samples and a stride of `p` samples there are `(n - w) / p + 1` windows
/// (none when `n < w`).
pub fn make_windows(session: &SessionData, params: &WindowParams) -> Result<Vec<LabeledWindow>> {
    params.validate()?;
    session.validate()?;
    let rate = session.sample_rate_hz;
    let win_n = (params.window_s * rate).round() as usize;
    let step_n = (params.step_s * rate).round() as usize;
    if win_n == 0 || step_n == 0 {
        return Err(Error::invalid(format!(
            "window ({}s) and step ({}s) must each cover at least one sample at {rate} Hz",
            params.window_s, params.step_s
        )));
    }
    let n = session.n_samples();
    if n < win_n {
        return Ok(Vec::new());
    }
    let derived = SessionChannels::from_session(session, params.clip_mv)?;

    // per-sample labels once, windows then slice into this
    let sample_labels: Vec<LabelTriple> = (0..n)
        .map(|i| {
            let (class, joint, partner) = label_at(&session.labels, i as f64 / rate);
            (class, joint, partner.map(|p| p.to_string()))
        })
        .collect();

    let count = (n - win_n) / step_n + 1;
    let mut out = Vec::with_capacity(count);
    for w in 0..count {
        let lo = w * step_n;
        let hi = lo + win_n;
        let (label, purity) = vote(&sample_labels[lo..hi]);
        let any_invalid = session.valid[lo..hi].iter().any(|&v| !v);
        let discard = discard_for(label.class, any_invalid);
        let channels = derived
            .channels
            .iter()
            .map(|(&source, data)| (source, data[lo..hi].to_vec()))
            .collect();
        out.push(LabeledWindow {
            agent_id: session.agent_id.clone(),
            group_id: session.group_id,
            day_index: session.day_index,
            start_s: lo as f64 / rate,
            duration_s: win_n as f64 / rate,
            channels,
            e_clipped: derived.e_clipped[lo..hi].to_vec(),
            label,
            purity,
            discard,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::LabelInterval;

    fn session_with(labels: Vec<LabelInterval>, n: usize, rate: f64) -> SessionData {
        SessionData {
            agent_id: "P1".into(),
            group_id: 1,
            day_index: 1,
            sample_rate_hz: rate,
            potential_mv: (0..n).map(|i| (i % 7) as f64 * 0.1).collect(),
            accel_wrist: vec![[0.0, 0.0, 1.0]; n],
            accel_calf: vec![[0.0, 0.0, 1.0]; n],
            valid: vec![true; n],
            labels,
        }
    }

    #[test]
    fn sixty_seconds_gives_fifty_six_windows() {
        let s = session_with(
            vec![LabelInterval::solo(0.0, 60.0, LabelClass::A3)],
            3000,
            50.0,
        );
        let windows = make_windows(&s, &WindowParams::default()).unwrap();
        assert_eq!(windows.len(), 56);
        assert_eq!(windows[0].start_s, 0.0);
        assert_eq!(windows[55].start_s, 55.0);
        assert!(windows.iter().all(|w| w.duration_s == 5.0));
        assert!(windows.iter().all(|w| w.channels[&Source::EWrist].len() == 250));
    }

    #[test]
    fn too_short_session_yields_no_windows() {
        let s = session_with(vec![], 100, 50.0);
        assert!(make_windows(&s, &WindowParams::default()).unwrap().is_empty());
    }

    #[test]
    fn majority_vote_sets_label_and_purity() {
        // A3 for 6 s then A4; the window [2, 7) sees 4 s of A3
        let s = session_with(
            vec![
                LabelInterval::solo(0.0, 6.0, LabelClass::A3),
                LabelInterval::solo(6.0, 10.0, LabelClass::A4),
            ],
            500,
            50.0,
        );
        let windows = make_windows(&s, &WindowParams::default()).unwrap();
        let w = &windows[2];
        assert_eq!(w.start_s, 2.0);
        assert_eq!(w.label.class, LabelClass::A3);
        assert!((w.purity - 0.8).abs() < 1e-12);
        assert!(w.is_usable());
    }

    #[test]
    fn ties_go_to_the_earliest_triple() {
        // half A4, half A3 inside one window: A4 appears first
        let s = session_with(
            vec![
                LabelInterval::solo(0.0, 2.5, LabelClass::A4),
                LabelInterval::solo(2.5, 5.0, LabelClass::A3),
            ],
            250,
            50.0,
        );
        let windows = make_windows(&s, &WindowParams::default()).unwrap();
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0].label.class, LabelClass::A4);
        assert_eq!(windows[0].purity, 0.5);
    }

    #[test]
    fn joint_and_partner_survive_the_vote() {
        let s = session_with(
            vec![LabelInterval::joint(0.0, 10.0, LabelClass::A5, "P2")],
            500,
            50.0,
        );
        let windows = make_windows(&s, &WindowParams::default()).unwrap();
        assert!(windows.iter().all(|w| w.label.joint));
        assert!(windows.iter().all(|w| w.label.partner.as_deref() == Some("P2")));
    }

    #[test]
    fn data_loss_outranks_every_other_reason() {
        let mut s = session_with(
            vec![LabelInterval::solo(0.0, 10.0, LabelClass::A1)],
            500,
            50.0,
        );
        s.valid[260] = false; // inside windows starting at 1..=5 s
        let windows = make_windows(&s, &WindowParams::default()).unwrap();
        assert_eq!(windows[0].discard, Some(DiscardReason::SyncArtifact));
        assert_eq!(windows[1].discard, Some(DiscardReason::DataLoss));
        assert_eq!(windows[5].discard, Some(DiscardReason::DataLoss));
    }

    #[test]
    fn discard_reasons_follow_the_class() {
        for (class, reason) in [
            (LabelClass::A9, DiscardReason::Undefined),
            (LabelClass::A10, DiscardReason::OutOfCamera),
        ] {
            let s = session_with(vec![LabelInterval::solo(0.0, 10.0, class)], 500, 50.0);
            let windows = make_windows(&s, &WindowParams::default()).unwrap();
            assert!(windows.iter().all(|w| w.discard == Some(reason)));
        }
        // no labels at all -> unlabeled
        let s = session_with(vec![], 500, 50.0);
        let windows = make_windows(&s, &WindowParams::default()).unwrap();
        assert!(windows.iter().all(|w| w.discard == Some(DiscardReason::Unlabeled)));
    }

    #[test]
    fn bad_params_are_rejected() {
        let s = session_with(vec![], 500, 50.0);
        let bad = WindowParams {
            window_s: 1.0,
            step_s: 2.0,
            clip_mv: 3.0,
        };
        assert!(make_windows(&s, &bad).is_err());
    }
}
