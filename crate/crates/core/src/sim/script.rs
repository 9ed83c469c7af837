//! Choreography input for the session synthesiser.
//!
//! A script lists the agents of one recording (with their group/day
//! metadata) and, per agent, a time-ordered list of activity segments.
//! Scripts are stored as TOML:
//!
//! ```toml
//! [[agents]]
//! id = "P1"
//! group = 1
//! day = 1
//!
//! [[segments]]
//! agent = "P1"
//! start_s = 0.0
//! end_s = 10.0
//! primitive = "A1"
//!
//! [[segments]]
//! agent = "P1"
//! start_s = 10.0
//! end_s = 25.0
//! primitive = "A5"
//! partner = "P2"
//! ```
//!
//! Unknown keys are rejected. Joint primitives (`A5`, partnered `A6`/`A7`,
//! `handshake`) must be mirrored: the named partner needs a segment with the
//! same primitive and the same time range pointing back. Requiring exact
//! time alignment (rather than mere overlap) keeps the labels truthful — a
//! segment never claims a partner who has already let go.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::label::{LabelClass, LabelInterval};

/// What an agent is doing during one segment. `A1`..`A10` follow the label
/// taxonomy; `handshake` is a synthesis-only distractor: a one-sample
/// conductive coupling between two standing agents, labeled as `A2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Primitive {
    SyncSteps,
    StandStill,
    Walk,
    CarryAlone,
    CarryJointly,
    Lift,
    Drop,
    TurnScrew,
    Undefined,
    OutOfCamera,
    Handshake,
}

impl Primitive {
    /// Label class written into the session's label timeline.
    pub fn label(self) -> LabelClass {
        match self {
            Primitive::SyncSteps => LabelClass::A1,
            Primitive::StandStill => LabelClass::A2,
            Primitive::Walk => LabelClass::A3,
            Primitive::CarryAlone => LabelClass::A4,
            Primitive::CarryJointly => LabelClass::A5,
            Primitive::Lift => LabelClass::A6,
            Primitive::Drop => LabelClass::A7,
            Primitive::TurnScrew => LabelClass::A8,
            Primitive::Undefined => LabelClass::A9,
            Primitive::OutOfCamera => LabelClass::A10,
            Primitive::Handshake => LabelClass::A2,
        }
    }

    pub fn requires_partner(self) -> bool {
        matches!(self, Primitive::CarryJointly | Primitive::Handshake)
    }

    pub fn allows_partner(self) -> bool {
        self.requires_partner() || matches!(self, Primitive::Lift | Primitive::Drop)
    }

    /// Primitives performed while stepping (gait modulates the body
    /// capacitance and shakes the accelerometers).
    pub fn is_walking(self) -> bool {
        matches!(
            self,
            Primitive::SyncSteps
                | Primitive::Walk
                | Primitive::CarryAlone
                | Primitive::CarryJointly
                | Primitive::OutOfCamera
        )
    }

    fn token(self) -> &'static str {
        match self {
            Primitive::SyncSteps => "A1",
            Primitive::StandStill => "A2",
            Primitive::Walk => "A3",
            Primitive::CarryAlone => "A4",
            Primitive::CarryJointly => "A5",
            Primitive::Lift => "A6",
            Primitive::Drop => "A7",
            Primitive::TurnScrew => "A8",
            Primitive::Undefined => "A9",
            Primitive::OutOfCamera => "A10",
            Primitive::Handshake => "handshake",
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl TryFrom<String> for Primitive {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Primitive> for String {
    fn from(p: Primitive) -> String {
        p.to_string()
    }
}

impl FromStr for Primitive {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "A1" => Primitive::SyncSteps,
            "A2" => Primitive::StandStill,
            "A3" => Primitive::Walk,
            "A4" => Primitive::CarryAlone,
            "A5" => Primitive::CarryJointly,
            "A6" => Primitive::Lift,
            "A7" => Primitive::Drop,
            "A8" => Primitive::TurnScrew,
            "A9" => Primitive::Undefined,
            "A10" => Primitive::OutOfCamera,
            "handshake" => Primitive::Handshake,
            other => return Err(Error::invalid(format!("unknown primitive {other:?}"))),
        })
    }
}

/// One agent of a script, with the session metadata its output files carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    #[serde(default = "one")]
    pub group: u32,
    #[serde(default = "one")]
    pub day: u32,
}

fn one() -> u32 {
    1
}

/// One activity stretch of one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub agent: String,
    pub start_s: f64,
    pub end_s: f64,
    pub primitive: Primitive,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
}

impl Segment {
    fn describe(&self) -> String {
        match &self.partner {
            Some(p) => format!(
                "{} [{}, {}) {} with {p}",
                self.agent, self.start_s, self.end_s, self.primitive
            ),
            None => format!(
                "{} [{}, {}) {}",
                self.agent, self.start_s, self.end_s, self.primitive
            ),
        }
    }

    /// The label interval this segment writes into its agent's timeline.
    /// The handshake distractor is labeled as plain standing.
    pub fn label_interval(&self) -> LabelInterval {
        let joint = self.partner.is_some() && self.primitive != Primitive::Handshake;
        LabelInterval {
            start_s: self.start_s,
            end_s: self.end_s,
            class: self.primitive.label(),
            joint,
            partner: if joint { self.partner.clone() } else { None },
        }
    }
}

/// A full recording choreography.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivityScript {
    pub agents: Vec<AgentSpec>,
    pub segments: Vec<Segment>,
}

fn id_ok(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl ActivityScript {
    /// End of the last segment; the synthesised sessions cover `[0, span)`.
    pub fn span_s(&self) -> f64 {
        self.segments.iter().fold(0.0, |acc, s| acc.max(s.end_s))
    }

    pub fn agent_ids(&self) -> Vec<&str> {
        self.agents.iter().map(|a| a.id.as_str()).collect()
    }

    /// Segments of one agent, sorted by start time.
    pub fn segments_for(&self, agent: &str) -> Vec<&Segment> {
        let mut out: Vec<&Segment> = self.segments.iter().filter(|s| s.agent == agent).collect();
        out.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
        out
    }

    /// Full structural validation; collects every violation rather than
    /// stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.agents.is_empty() {
            problems.push("script has no agents".to_string());
        }
        let mut ids = BTreeSet::new();
        for agent in &self.agents {
            if !id_ok(&agent.id) {
                problems.push(format!(
                    "agent id {:?} must be non-empty and use only [A-Za-z0-9_-]",
                    agent.id
                ));
            }
            if !ids.insert(agent.id.as_str()) {
                problems.push(format!("duplicate agent id {:?}", agent.id));
            }
            if agent.group == 0 || agent.day == 0 {
                problems.push(format!("agent {:?}: group and day are 1-based", agent.id));
            }
        }

        for segment in &self.segments {
            if !ids.contains(segment.agent.as_str()) {
                problems.push(format!("segment {}: unknown agent", segment.describe()));
            }
            if !segment.start_s.is_finite()
                || !segment.end_s.is_finite()
                || segment.start_s < 0.0
                || segment.start_s >= segment.end_s
            {
                problems.push(format!(
                    "segment {}: time range must satisfy 0 <= start < end",
                    segment.describe()
                ));
            }
            match &segment.partner {
                Some(partner) => {
                    if !segment.primitive.allows_partner() {
                        problems.push(format!(
                            "segment {}: {} takes no partner",
                            segment.describe(),
                            segment.primitive
                        ));
                    }
                    if partner == &segment.agent {
                        problems.push(format!(
                            "segment {}: agent partnered with itself",
                            segment.describe()
                        ));
                    } else if !ids.contains(partner.as_str()) {
                        problems.push(format!("segment {}: unknown partner", segment.describe()));
                    }
                }
                None => {
                    if segment.primitive.requires_partner() {
                        problems.push(format!(
                            "segment {}: {} requires a partner",
                            segment.describe(),
                            segment.primitive
                        ));
                    }
                }
            }
        }

        // per-agent ordering and overlap
        let mut by_agent: BTreeMap<&str, Vec<&Segment>> = BTreeMap::new();
        for segment in &self.segments {
            by_agent.entry(segment.agent.as_str()).or_default().push(segment);
        }
        for segments in by_agent.values_mut() {
            segments.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
            for pair in segments.windows(2) {
                if pair[1].start_s < pair[0].end_s {
                    problems.push(format!(
                        "overlapping segments: {} and {}",
                        pair[0].describe(),
                        pair[1].describe()
                    ));
                }
            }
        }

        // joint segments need an exact mirror on the partner's timeline
        for segment in &self.segments {
            let Some(partner) = &segment.partner else { continue };
            let mirrored = self.segments.iter().any(|other| {
                other.agent == *partner
                    && other.partner.as_deref() == Some(segment.agent.as_str())
                    && other.primitive == segment.primitive
                    && other.start_s == segment.start_s
                    && other.end_s == segment.end_s
            });
            if !mirrored {
                problems.push(format!(
                    "segment {}: partner has no matching {} segment over the same time range",
                    segment.describe(),
                    segment.primitive
                ));
            }
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Label timeline of one agent, as written into its session.
    pub fn label_intervals_for(&self, agent: &str) -> Vec<LabelInterval> {
        self.segments_for(agent)
            .into_iter()
            .map(|s| s.label_interval())
            .collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let script: ActivityScript = toml::from_str(&text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        script.validate()?;
        Ok(script)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::config(format!("script serialisation failed: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }
}
