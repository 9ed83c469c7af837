//! Leave-one-group-out fold construction.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ingest::SessionData;

/// One cross-validation fold: all sessions of `held_out_group` form the test
/// side, everything else trains. Sides hold indices into the session list
/// they were built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub held_out_group: u32,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Builds one fold per distinct group, ordered by group id.
///
/// Errors when fewer than two groups are present, when the same session
/// (group, day, agent) appears twice, or when one (agent, day) recording is
/// claimed by several groups.
pub fn logo_folds(sessions: &[SessionData]) -> Result<Vec<Fold>> {
    let mut problems = Vec::new();
    let mut seen: BTreeSet<(u32, u32, &str)> = BTreeSet::new();
    let mut agent_day_groups: BTreeMap<(&str, u32), BTreeSet<u32>> = BTreeMap::new();
    for s in sessions {
        if !seen.insert((s.group_id, s.day_index, s.agent_id.as_str())) {
            problems.push(format!("session {} appears more than once", s.session_id()));
        }
        agent_day_groups
            .entry((s.agent_id.as_str(), s.day_index))
            .or_default()
            .insert(s.group_id);
    }
    for ((agent, day), groups) in &agent_day_groups {
        if groups.len() > 1 {
            let list: Vec<String> = groups.iter().map(|g| g.to_string()).collect();
            problems.push(format!(
                "agent {agent} day {day} is claimed by groups {}",
                list.join(", ")
            ));
        }
    }
    let groups: BTreeSet<u32> = sessions.iter().map(|s| s.group_id).collect();
    if groups.len() < 2 {
        problems.push(format!(
            "leave-one-group-out needs at least 2 groups, found {}",
            groups.len()
        ));
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    Ok(groups
        .into_iter()
        .map(|held_out_group| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..sessions.len()).partition(|&i| sessions[i].group_id == held_out_group);
            Fold {
                held_out_group,
                train,
                test,
            }
        })
        .collect())
}
