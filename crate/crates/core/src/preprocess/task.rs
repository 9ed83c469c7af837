//! Mapping window labels onto recognition targets.
//!
//! Two axes define a task. The *mode* decides whose windows are classified:
//! each agent on their own, or an agent pair judged jointly. The *variant*
//! decides whether lifting and setting down count as classes of their own or
//! fold into the background.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::LabelClass;
use crate::preprocess::window::LabeledWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Classify each agent's windows independently.
    SingleUser,
    /// Classify agent pairs; only mutually-confirmed joint work counts.
    Pairwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Lift and drop are classes of their own.
    Full,
    /// Lift and drop count as background.
    LiftDropNull,
}

/// One task: a mode plus a variant. Serialised as its token, e.g.
/// `"pairwise_full"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TaskMode {
    pub mode: Mode,
    pub variant: Variant,
}

impl TryFrom<String> for TaskMode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TaskMode> for String {
    fn from(task: TaskMode) -> String {
        task.token()
    }
}

impl TaskMode {
    pub const ALL: [TaskMode; 4] = [
        TaskMode { mode: Mode::SingleUser, variant: Variant::Full },
        TaskMode { mode: Mode::SingleUser, variant: Variant::LiftDropNull },
        TaskMode { mode: Mode::Pairwise, variant: Variant::Full },
        TaskMode { mode: Mode::Pairwise, variant: Variant::LiftDropNull },
    ];

    pub fn token(self) -> String {
        let mode = match self.mode {
            Mode::SingleUser => "single_user",
            Mode::Pairwise => "pairwise",
        };
        let variant = match self.variant {
            Variant::Full => "full",
            Variant::LiftDropNull => "lift_drop_null",
        };
        format!("{mode}_{variant}")
    }
}

impl fmt::Display for TaskMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

impl FromStr for TaskMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskMode::ALL
            .into_iter()
            .find(|t| t.token() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown task {s:?}; expected one of single_user_full, \
                     single_user_lift_drop_null, pairwise_full, pairwise_lift_drop_null"
                ))
            })
    }
}

/// What a classifier predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetClass {
    Walk,
    CarryAlone,
    CarryJointly,
    Lift,
    Drop,
    LiftTogether,
    DropTogether,
    /// Anything the task does not single out.
    Null,
}

impl TargetClass {
    pub fn token(self) -> &'static str {
        match self {
            TargetClass::Walk => "walk",
            TargetClass::CarryAlone => "carry_alone",
            TargetClass::CarryJointly => "carry_jointly",
            TargetClass::Lift => "lift",
            TargetClass::Drop => "drop",
            TargetClass::LiftTogether => "lift_together",
            TargetClass::DropTogether => "drop_together",
            TargetClass::Null => "null",
        }
    }
}

impl fmt::Display for TargetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The class set a task is scored over, in reporting order.
pub fn task_classes(task: TaskMode) -> Vec<TargetClass> {
    use TargetClass::*;
    match (task.mode, task.variant) {
        (Mode::SingleUser, Variant::Full) => {
            vec![Walk, CarryAlone, CarryJointly, Lift, Drop, Null]
        }
        (Mode::SingleUser, Variant::LiftDropNull) => vec![Walk, CarryAlone, CarryJointly, Null],
        (Mode::Pairwise, Variant::Full) => vec![CarryJointly, LiftTogether, DropTogether, Null],
        (Mode::Pairwise, Variant::LiftDropNull) => vec![CarryJointly, Null],
    }
}

/// Target for one agent's window under a single-user task.
pub fn single_task_label(window: &LabeledWindow, task: TaskMode) -> Result<TargetClass> {
    if task.mode != Mode::SingleUser {
        return Err(Error::invalid("single_task_label requires a single-user task"));
    }
    if let Some(reason) = window.discard {
        return Err(Error::invalid(format!(
            "cannot map a discarded window (reason: {reason})"
        )));
    }
    let lift_drop_count = task.variant == Variant::Full;
    Ok(match window.label.class {
        LabelClass::A3 => TargetClass::Walk,
        LabelClass::A4 => TargetClass::CarryAlone,
        LabelClass::A5 => TargetClass::CarryJointly,
        LabelClass::A6 if lift_drop_count => TargetClass::Lift,
        LabelClass::A7 if lift_drop_count => TargetClass::Drop,
        _ => TargetClass::Null,
    })
}

fn mutually_joint(a: &LabeledWindow, b: &LabeledWindow) -> bool {
    a.label.joint
        && b.label.joint
        && a.label.class == b.label.class
        && a.label.partner.as_deref() == Some(b.agent_id.as_str())
        && b.label.partner.as_deref() == Some(a.agent_id.as_str())
}

/// Target for a pair of time-aligned windows under a pairwise task. The pair
/// carries a collaborative class only when both sides agree: same class, both
/// marked joint, each naming the other as partner. Everything else is `Null`.
pub fn pair_task_label(a: &LabeledWindow, b: &LabeledWindow, task: TaskMode) -> Result<TargetClass> {
    if task.mode != Mode::Pairwise {
        return Err(Error::invalid("pair_task_label requires a pairwise task"));
    }
    if a.agent_id == b.agent_id {
        return Err(Error::invalid(format!(
            "a pair needs two distinct agents, got {:?} twice",
            a.agent_id
        )));
    }
    for w in [a, b] {
        if let Some(reason) = w.discard {
            return Err(Error::invalid(format!(
                "cannot map a discarded window (reason: {reason})"
            )));
        }
    }
    if !mutually_joint(a, b) {
        return Ok(TargetClass::Null);
    }
    let lift_drop_count = task.variant == Variant::Full;
    Ok(match a.label.class {
        LabelClass::A5 => TargetClass::CarryJointly,
        LabelClass::A6 if lift_drop_count => TargetClass::LiftTogether,
        LabelClass::A7 if lift_drop_count => TargetClass::DropTogether,
        _ => TargetClass::Null,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::window::WindowLabel;
    use std::collections::BTreeMap;

    fn window(agent: &str, class: LabelClass, joint: bool, partner: Option<&str>) -> LabeledWindow {
        LabeledWindow {
            agent_id: agent.to_string(),
            group_id: 1,
            day_index: 1,
            start_s: 0.0,
            duration_s: 5.0,
            channels: BTreeMap::new(),
            e_clipped: Vec::new(),
            label: WindowLabel {
                class,
                joint,
                partner: partner.map(|p| p.to_string()),
            },
            purity: 1.0,
            discard: None,
        }
    }

    #[test]
    fn class_sets_per_task() {
        use TargetClass::*;
        let su_full = TaskMode { mode: Mode::SingleUser, variant: Variant::Full };
        assert_eq!(task_classes(su_full), vec![Walk, CarryAlone, CarryJointly, Lift, Drop, Null]);
        let pw_ldn = TaskMode { mode: Mode::Pairwise, variant: Variant::LiftDropNull };
        assert_eq!(task_classes(pw_ldn), vec![CarryJointly, Null]);
    }

    #[test]
    fn single_user_mapping() {
        let full = TaskMode { mode: Mode::SingleUser, variant: Variant::Full };
        let ldn = TaskMode { mode: Mode::SingleUser, variant: Variant::LiftDropNull };
        let lift = window("P1", LabelClass::A6, false, None);
        assert_eq!(single_task_label(&lift, full).unwrap(), TargetClass::Lift);
        assert_eq!(single_task_label(&lift, ldn).unwrap(), TargetClass::Null);
        let stand = window("P1", LabelClass::A2, false, None);
        assert_eq!(single_task_label(&stand, full).unwrap(), TargetClass::Null);
        let screw = window("P1", LabelClass::A8, false, None);
        assert_eq!(single_task_label(&screw, full).unwrap(), TargetClass::Null);
    }

    #[test]
    fn discarded_windows_cannot_be_mapped() {
        let full = TaskMode { mode: Mode::SingleUser, variant: Variant::Full };
        let mut w = window("P1", LabelClass::A3, false, None);
        w.discard = Some(crate::preprocess::window::DiscardReason::DataLoss);
        assert!(single_task_label(&w, full).is_err());
    }

    #[test]
    fn pair_label_needs_mutual_confirmation() {
        let full = TaskMode { mode: Mode::Pairwise, variant: Variant::Full };
        let a = window("P1", LabelClass::A5, true, Some("P2"));
        let b = window("P2", LabelClass::A5, true, Some("P1"));
        assert_eq!(pair_task_label(&a, &b, full).unwrap(), TargetClass::CarryJointly);

        // partner mismatch: P2 thinks it works with P3
        let stray = window("P2", LabelClass::A5, true, Some("P3"));
        assert_eq!(pair_task_label(&a, &stray, full).unwrap(), TargetClass::Null);

        // class mismatch
        let lifting = window("P2", LabelClass::A6, true, Some("P1"));
        assert_eq!(pair_task_label(&a, &lifting, full).unwrap(), TargetClass::Null);

        // two solo carriers never count as a pair
        let solo_a = window("P1", LabelClass::A4, false, None);
        let solo_b = window("P2", LabelClass::A4, false, None);
        assert_eq!(pair_task_label(&solo_a, &solo_b, full).unwrap(), TargetClass::Null);
    }

    #[test]
    fn joint_lift_and_drop_follow_the_variant() {
        let full = TaskMode { mode: Mode::Pairwise, variant: Variant::Full };
        let ldn = TaskMode { mode: Mode::Pairwise, variant: Variant::LiftDropNull };
        let a = window("P1", LabelClass::A6, true, Some("P2"));
        let b = window("P2", LabelClass::A6, true, Some("P1"));
        assert_eq!(pair_task_label(&a, &b, full).unwrap(), TargetClass::LiftTogether);
        assert_eq!(pair_task_label(&a, &b, ldn).unwrap(), TargetClass::Null);
    }

    #[test]
    fn same_agent_twice_is_an_error() {
        let full = TaskMode { mode: Mode::Pairwise, variant: Variant::Full };
        let a = window("P1", LabelClass::A5, true, Some("P1"));
        assert!(pair_task_label(&a, &a, full).is_err());
    }

    #[test]
    fn task_token_round_trip() {
        for task in TaskMode::ALL {
            assert_eq!(task.token().parse::<TaskMode>().unwrap(), task);
        }
        assert!("pairwise".parse::<TaskMode>().is_err());
    }
}
