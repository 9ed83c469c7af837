//! Randomised choreography builder.
//!
//! Produces a plausible group workday: synchronised start/stop steps,
//! stretches of walking, solo and joint carries book-ended by lifts and
//! drops, screwdriving, and the occasional distractor (handshake, undefined
//! activity, out-of-camera stretch). Phases come from a shuffled deck so
//! every class shows up with a sensible share regardless of seed.
//!
//! Two agents carrying alone *at the same time* is deliberately in the deck:
//! to wrist accelerometers such a pair looks exactly like a joint carry, so
//! telling them apart falls to the potential channel.
//!
//! The builder tracks time in whole deciseconds and converts when a segment
//! is emitted, so abutting segments always share bit-identical boundaries.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sim::script::{ActivityScript, AgentSpec, Primitive, Segment};

/// Length of the synchronisation stretch at both ends of a session, ds.
const SYNC_DS: u64 = 50;

#[derive(Clone, Copy)]
enum Phase {
    JointChain,
    SoloChain,
    WalkAll,
    ScrewMix,
    StandAll,
    Distraction,
    OffCamera,
}

/// One shuffled deck of phases; joint work dominates, matching how often the
/// downstream tasks need to see it.
const DECK: [Phase; 10] = [
    Phase::JointChain,
    Phase::SoloChain,
    Phase::WalkAll,
    Phase::JointChain,
    Phase::ScrewMix,
    Phase::SoloChain,
    Phase::StandAll,
    Phase::JointChain,
    Phase::Distraction,
    Phase::OffCamera,
];

struct Builder {
    agents: Vec<String>,
    segments: Vec<Segment>,
    /// Current phase start, deciseconds.
    t: u64,
    pairs: Vec<(usize, usize)>,
    next_pair: usize,
    next_role: usize,
}

fn s(ds: u64) -> f64 {
    ds as f64 / 10.0
}

impl Builder {
    /// Emits one segment for `agent` covering `[t + offset, t + offset + dur)`.
    fn emit(
        &mut self,
        agent: usize,
        offset_ds: u64,
        dur_ds: u64,
        primitive: Primitive,
        partner: Option<usize>,
    ) {
        let start = self.t + offset_ds;
        self.segments.push(Segment {
            agent: self.agents[agent].clone(),
            start_s: s(start),
            end_s: s(start + dur_ds),
            primitive,
            partner: partner.map(|p| self.agents[p].clone()),
        });
    }

    fn everyone(&mut self, dur_ds: u64, primitive: Primitive) {
        for a in 0..self.agents.len() {
            self.emit(a, 0, dur_ds, primitive, None);
        }
        self.t += dur_ds;
    }

    fn take_pair(&mut self) -> (usize, usize) {
        let pair = self.pairs[self.next_pair % self.pairs.len()];
        self.next_pair += 1;
        pair
    }

    /// Agents not in `pair`, in rotating order so side roles spread evenly.
    fn bystanders(&mut self, pair: (usize, usize)) -> Vec<usize> {
        let mut rest: Vec<usize> =
            (0..self.agents.len()).filter(|&a| a != pair.0 && a != pair.1).collect();
        let shift = self.next_role % rest.len().max(1);
        rest.rotate_left(shift);
        self.next_role += 1;
        rest
    }

    /// lift -> carry -> drop for one agent, optionally partnered.
    fn carry_chain(
        &mut self,
        agent: usize,
        partner: Option<usize>,
        lift_ds: u64,
        haul_ds: u64,
        drop_ds: u64,
    ) {
        self.emit(agent, 0, lift_ds, Primitive::Lift, partner);
        self.emit(agent, lift_ds, haul_ds, Primitive::CarryJointly, partner);
        self.emit(agent, lift_ds + haul_ds, drop_ds, Primitive::Drop, partner);
    }

    /// Same rhythm, own load.
    fn solo_carry_chain(&mut self, agent: usize, lift_ds: u64, haul_ds: u64, drop_ds: u64) {
        self.emit(agent, 0, lift_ds, Primitive::Lift, None);
        self.emit(agent, lift_ds, haul_ds, Primitive::CarryAlone, None);
        self.emit(agent, lift_ds + haul_ds, drop_ds, Primitive::Drop, None);
    }
}

fn dur(rng: &mut ChaCha8Rng, lo_ds: u64, hi_ds: u64) -> u64 {
    rng.gen_range(lo_ds..=hi_ds)
}

/// Builds the script for one group on one day. All sessions of the script
/// share the same timeline; total length lands close to `duration_s`.
/// Deterministic in (agents, duration, seed).
pub fn group_day_script(
    group: u32,
    day: u32,
    agent_ids: &[&str],
    duration_s: f64,
    seed: u64,
) -> Result<ActivityScript> {
    if agent_ids.len() < 2 {
        return Err(Error::invalid("a group script needs at least two agents"));
    }
    if !duration_s.is_finite() || duration_s < 60.0 {
        return Err(Error::invalid(format!(
            "duration must be at least 60 s, got {duration_s}"
        )));
    }
    let target_ds = (duration_s * 10.0).round() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = agent_ids.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    let mut b = Builder {
        agents: agent_ids.iter().map(|s| s.to_string()).collect(),
        segments: Vec::new(),
        t: 0,
        pairs,
        next_pair: 0,
        next_role: 0,
    };

    b.everyone(SYNC_DS, Primitive::SyncSteps);

    let mut deck: Vec<Phase> = Vec::new();
    // leave room for the closing sync steps
    while b.t < target_ds.saturating_sub(3 * SYNC_DS) {
        let phase = match deck.pop() {
            Some(p) => p,
            None => {
                deck = DECK.to_vec();
                deck.shuffle(&mut rng);
                continue;
            }
        };
        match phase {
            Phase::JointChain => {
                // lift together, haul together, set down together; hauls run
                // long so most carry windows sit clear of the transitions
                let pair = b.take_pair();
                let lift = dur(&mut rng, 40, 60);
                let haul = dur(&mut rng, 180, 300);
                let drop = dur(&mut rng, 40, 60);
                let total = lift + haul + drop;
                b.carry_chain(pair.0, Some(pair.1), lift, haul, drop);
                b.carry_chain(pair.1, Some(pair.0), lift, haul, drop);
                let side_carries = rng.gen_bool(0.5);
                let others = b.bystanders(pair);
                for (k, a) in others.into_iter().enumerate() {
                    if k == 0 && side_carries {
                        b.solo_carry_chain(a, lift, haul, drop);
                    } else if k == 0 {
                        b.emit(a, 0, total, Primitive::Walk, None);
                    } else {
                        b.emit(a, 0, total, Primitive::StandStill, None);
                    }
                }
                b.t += total;
            }
            Phase::SoloChain => {
                // two agents each haul their own load, in step with each
                // other; wrist-only sensing cannot tell this from joint work
                let pair = b.take_pair();
                let lift = dur(&mut rng, 40, 60);
                let haul = dur(&mut rng, 180, 300);
                let drop = dur(&mut rng, 40, 60);
                let total = lift + haul + drop;
                b.solo_carry_chain(pair.0, lift, haul, drop);
                b.solo_carry_chain(pair.1, lift, haul, drop);
                let others = b.bystanders(pair);
                for (k, a) in others.into_iter().enumerate() {
                    let p = if k == 0 { Primitive::Walk } else { Primitive::StandStill };
                    b.emit(a, 0, total, p, None);
                }
                b.t += total;
            }
            Phase::WalkAll => {
                let d = dur(&mut rng, 80, 140);
                b.everyone(d, Primitive::Walk);
            }
            Phase::ScrewMix => {
                let d = dur(&mut rng, 60, 100);
                let pair = b.take_pair();
                b.emit(pair.0, 0, d, Primitive::TurnScrew, None);
                b.emit(pair.1, 0, d, Primitive::Walk, None);
                let others = b.bystanders(pair);
                for a in others {
                    b.emit(a, 0, d, Primitive::StandStill, None);
                }
                b.t += d;
            }
            Phase::StandAll => {
                let d = dur(&mut rng, 60, 100);
                b.everyone(d, Primitive::StandStill);
            }
            Phase::Distraction => {
                // greeting plus an off-vocabulary stretch and a labelling gap
                let pair = b.take_pair();
                let lead = dur(&mut rng, 10, 20);
                let tail = dur(&mut rng, 20, 40);
                let total = lead + 10 + tail;
                for (me, other) in [(pair.0, pair.1), (pair.1, pair.0)] {
                    b.emit(me, 0, lead, Primitive::StandStill, None);
                    b.emit(me, lead, 10, Primitive::Handshake, Some(other));
                    b.emit(me, lead + 10, tail, Primitive::StandStill, None);
                }
                let others = b.bystanders(pair);
                for a in others {
                    // undefined activity, then an unlabeled gap to the end
                    // of the phase
                    let covered = total.saturating_sub(15).max(10);
                    b.emit(a, 0, covered, Primitive::Undefined, None);
                }
                b.t += total;
            }
            Phase::OffCamera => {
                let d = dur(&mut rng, 50, 80);
                let pair = b.take_pair();
                b.emit(pair.0, 0, d, Primitive::OutOfCamera, None);
                b.emit(pair.1, 0, d, Primitive::Walk, None);
                let others = b.bystanders(pair);
                for a in others {
                    b.emit(a, 0, d, Primitive::Walk, None);
                }
                b.t += d;
            }
        }
    }

    b.everyone(SYNC_DS, Primitive::SyncSteps);

    let script = ActivityScript {
        agents: agent_ids
            .iter()
            .map(|id| AgentSpec {
                id: id.to_string(),
                group,
                day,
            })
            .collect(),
        segments: b.segments,
    };
    script.validate()?;
    Ok(script)
}
