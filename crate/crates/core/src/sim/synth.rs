//! Script-driven session synthesis.
//!
//! Each agent is a body with a capacitance that depends on what it is doing:
//! steps swing it by `step_delta_c_pf`, holding the metal load alone adds
//! `load_delta_c_pf`, and working jointly merges the two bodies into one
//! conductor of `C_a + C_b + joint_extra_c_pf`. Every capacitance change
//! jolts the potential under conserved charge; between jolts the front end
//! relaxes the potential back to rest. A bigger total capacitance therefore
//! means smaller per-step potential swings, which is the signature that
//! separates walking alone, carrying alone, and carrying jointly.
//!
//! Bodies sit at a small static potential relative to the environment
//! ([`AMBIENT_STATIC_POTENTIAL_V`]); the potential channel reports the
//! deviation from it. Without that offset a capacitance change at exactly
//! the rest potential would be silent.
//!
//! Accelerometer synthesis is deliberately crude: a sinusoid template per
//! primitive plus noise, just enough for amplitude statistics to carry the
//! motion classes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::ingest::session::SessionData;
use crate::sim::config::SimConfig;
use crate::sim::physics::{capacitance_jump, charge_share, relax, BodyState};
use crate::sim::script::{ActivityScript, Primitive, Segment};

/// Static charge offset of a body against the local environment, volts.
/// Sets the scale of every capacitance-induced potential excursion.
pub const AMBIENT_STATIC_POTENTIAL_V: f64 = 0.02;

/// Step cadence of every walking primitive, steps per second.
pub const STEP_RATE_HZ: f64 = 2.0;

/// Accelerometer noise rides on the potential-noise knob with this factor,
/// g per millivolt (defaults: 0.05 mV -> 0.02 g).
pub const ACCEL_NOISE_G_PER_MV: f64 = 0.4;

/// High half of the square-wave gait modulation.
fn step_high(t_s: f64) -> bool {
    (t_s * STEP_RATE_HZ).rem_euclid(1.0) < 0.5
}

/// Walks an agent's sorted segment list with a forward-only cursor.
struct SegmentCursor<'a> {
    segments: Vec<&'a Segment>,
    next: usize,
}

impl<'a> SegmentCursor<'a> {
    fn new(segments: Vec<&'a Segment>) -> Self {
        SegmentCursor { segments, next: 0 }
    }

    /// Active segment at `t`, assuming non-decreasing queries.
    fn active_at(&mut self, t_s: f64) -> Option<&'a Segment> {
        while self.next < self.segments.len() && t_s >= self.segments[self.next].end_s {
            self.next += 1;
        }
        match self.segments.get(self.next) {
            Some(s) if t_s >= s.start_s => Some(s),
            _ => None,
        }
    }
}

struct AgentPhys {
    body: BodyState,
    /// Capacitance of the conductor this agent is part of (own body, or the
    /// merged pair) as of the previous sample.
    c_unit: f64,
    partner: Option<usize>,
}

/// Individual capacitance of one agent while uncoupled (or its contribution
/// to a merged pair), given what it is doing at `t`.
fn individual_capacitance(cfg: &SimConfig, seg: Option<&Segment>, t_s: f64) -> f64 {
    let mut c = cfg.base_capacitance_pf;
    let Some(seg) = seg else { return c };
    let prim = seg.primitive;
    let solo = seg.partner.is_none();
    let holds_load_alone = matches!(prim, Primitive::CarryAlone)
        || (solo && matches!(prim, Primitive::Lift | Primitive::Drop));
    if holds_load_alone {
        c += cfg.load_delta_c_pf;
    }
    // joint primitives put their gait modulation on the merged conductor
    if prim.is_walking() && seg.partner.is_none() && step_high(t_s) {
        c += cfg.step_delta_c_pf;
    }
    c
}

/// Capacitance of a coupled pair: both bodies, the shared-load coupling, and
/// one gait modulation when the pair walks in step.
fn pair_capacitance(cfg: &SimConfig, c_a: f64, c_b: f64, prim: Primitive, t_s: f64) -> f64 {
    let mut c = c_a + c_b + cfg.joint_extra_c_pf;
    if prim.is_walking() && step_high(t_s) {
        c += cfg.step_delta_c_pf;
    }
    c
}

/// Index of the partner an agent wants to couple with at sample `i`.
/// Handshakes couple for exactly one sample at segment start.
fn coupling_target(
    seg: Option<&Segment>,
    i: usize,
    rate: f64,
    index_of: &dyn Fn(&str) -> usize,
) -> Option<usize> {
    let seg = seg?;
    let partner = seg.partner.as_deref()?;
    if seg.primitive == Primitive::Handshake {
        let start_sample = (seg.start_s * rate).round() as usize;
        if i != start_sample {
            return None;
        }
    }
    Some(index_of(partner))
}

// ---------------------------------------------------------------------------
// accelerometer templates
// ---------------------------------------------------------------------------

const TWO_PI: f64 = std::f64::consts::TAU;

/// Progress through a segment, 0 at start, 1 at end.
fn progress(seg: &Segment, t_s: f64) -> f64 {
    ((t_s - seg.start_s) / (seg.end_s - seg.start_s)).clamp(0.0, 1.0)
}

fn wrist_template(seg: Option<&Segment>, t_s: f64) -> [f64; 3] {
    let Some(seg) = seg else { return [0.0, 0.0, 1.0] };
    let stride = (TWO_PI * t_s).sin(); // arm swing at 1 Hz stride rate
    let bounce = (TWO_PI * STEP_RATE_HZ * t_s).sin();
    match seg.primitive {
        Primitive::Walk | Primitive::OutOfCamera => [0.30 * stride, 0.0, 1.0 + 0.20 * bounce],
        // the load pins the arm: half the swing of free walking
        Primitive::CarryAlone | Primitive::CarryJointly => {
            [0.15 * stride, 0.0, 1.0 + 0.10 * bounce]
        }
        Primitive::SyncSteps => [0.10 * bounce, 0.0, 1.0 + 0.20 * bounce],
        Primitive::Lift => [0.0, 0.0, 1.0 + 0.40 * (std::f64::consts::PI * progress(seg, t_s)).sin()],
        Primitive::Drop => [0.0, 0.0, 1.0 - 0.40 * (std::f64::consts::PI * progress(seg, t_s)).sin()],
        Primitive::TurnScrew => [
            0.05 * (TWO_PI * 8.0 * t_s).sin(),
            0.05 * (TWO_PI * 8.0 * t_s).cos(),
            1.0,
        ],
        Primitive::Undefined => [0.08 * (TWO_PI * 0.5 * t_s).sin(), 0.0, 1.0],
        Primitive::StandStill | Primitive::Handshake => [0.0, 0.0, 1.0],
    }
}

fn calf_template(seg: Option<&Segment>, t_s: f64) -> [f64; 3] {
    let Some(seg) = seg else { return [0.0, 0.0, 1.0] };
    let prim = seg.primitive;
    if prim.is_walking() {
        // gait dominates the calf regardless of what the hands hold
        let stride = if prim == Primitive::SyncSteps {
            0.05
        } else {
            0.20
        };
        return [
            stride * (TWO_PI * t_s).sin(),
            0.0,
            1.0 + 0.40 * (TWO_PI * STEP_RATE_HZ * t_s).sin(),
        ];
    }
    match prim {
        // knees dip for both lifting and setting down
        Primitive::Lift | Primitive::Drop => [
            0.0,
            0.0,
            1.0 + 0.10 * (std::f64::consts::PI * progress(seg, t_s)).sin(),
        ],
        _ => [0.0, 0.0, 1.0],
    }
}

// ---------------------------------------------------------------------------
// synthesis
// ---------------------------------------------------------------------------

/// Synthesises one session per scripted agent. Deterministic: the same
/// script and config (including seed) reproduce the output bit for bit.
pub fn synth_session(script: &ActivityScript, config: &SimConfig) -> Result<Vec<SessionData>> {
    script.validate()?;
    config.validate()?;

    let rate = config.sample_rate_hz;
    let dt = 1.0 / rate;
    let span = script.span_s();
    let n_samples = ((span * rate) - 1e-9).ceil().max(0.0) as usize;
    let n_agents = script.agents.len();
    let rest_abs = AMBIENT_STATIC_POTENTIAL_V + config.rest_potential_v;

    let index_of = {
        let ids: Vec<String> = script.agents.iter().map(|a| a.id.clone()).collect();
        move |id: &str| ids.iter().position(|x| x == id).expect("validated agent id")
    };

    // noise-free potential traces, volts of deviation from the static level
    let mut traces: Vec<Vec<f64>> = vec![Vec::with_capacity(n_samples); n_agents];
    let mut cursors: Vec<SegmentCursor> = script
        .agents
        .iter()
        .map(|a| SegmentCursor::new(script.segments_for(&a.id)))
        .collect();
    let mut phys: Vec<AgentPhys> = Vec::with_capacity(n_agents);

    let mut active: Vec<Option<&Segment>> = vec![None; n_agents];
    for i in 0..n_samples {
        let t = i as f64 * dt;
        for (a, cursor) in cursors.iter_mut().enumerate() {
            active[a] = cursor.active_at(t);
        }
        let wants: Vec<Option<usize>> = (0..n_agents)
            .map(|a| coupling_target(active[a], i, rate, &index_of))
            .collect();
        // coupling only happens when both sides ask for it
        let mutual: Vec<Option<usize>> = (0..n_agents)
            .map(|a| wants[a].filter(|&b| wants[b] == Some(a)))
            .collect();

        if i == 0 {
            // initial state: everything already at rest in its starting shape
            let c_indiv: Vec<f64> = (0..n_agents)
                .map(|a| individual_capacitance(config, active[a], t))
                .collect();
            for a in 0..n_agents {
                let mut body = BodyState::new(c_indiv[a], rest_abs)?;
                let c_unit = match mutual[a] {
                    Some(b) => {
                        body.coupled_with.insert(script.agents[b].id.clone());
                        pair_capacitance(
                            config,
                            c_indiv[a],
                            c_indiv[b],
                            active[a].expect("coupled agents have a segment").primitive,
                            t,
                        )
                    }
                    None => c_indiv[a],
                };
                phys.push(AgentPhys {
                    body,
                    c_unit,
                    partner: mutual[a],
                });
            }
        } else {
            // 1. dissolve pairs that stopped coupling: each body leaves with
            //    the shared potential and its own capacitance
            for a in 0..n_agents {
                if let Some(b) = phys[a].partner {
                    if a < b && mutual[a] != Some(b) {
                        let (id_a, id_b) = (script.agents[a].id.clone(), script.agents[b].id.clone());
                        for (x, other) in [(a, id_b), (b, id_a)] {
                            phys[x].partner = None;
                            phys[x].c_unit = phys[x].body.capacitance_pf;
                            phys[x].body.coupled_with.remove(&other);
                        }
                    }
                }
            }
            // 2. form new pairs: charge pools merge
            for a in 0..n_agents {
                if let Some(b) = mutual[a] {
                    if a < b && phys[a].partner != Some(b) {
                        let shared =
                            charge_share(&[phys[a].body.clone(), phys[b].body.clone()])?;
                        let c_sum = phys[a].body.capacitance_pf + phys[b].body.capacitance_pf;
                        let (id_a, id_b) = (script.agents[a].id.clone(), script.agents[b].id.clone());
                        for (x, y, other) in [(a, b, id_b), (b, a, id_a)] {
                            phys[x].partner = Some(y);
                            phys[x].c_unit = c_sum;
                            phys[x].body.potential_v = shared;
                            phys[x].body.coupled_with.insert(other);
                        }
                    }
                }
            }
            // 3. capacitance continuity: any change jolts the potential
            let c_indiv: Vec<f64> = (0..n_agents)
                .map(|a| individual_capacitance(config, active[a], t))
                .collect();
            for a in 0..n_agents {
                let c_now = match phys[a].partner {
                    Some(b) => {
                        if a > b {
                            // handled together with the lower index
                            phys[a].body.capacitance_pf = c_indiv[a];
                            continue;
                        }
                        pair_capacitance(
                            config,
                            c_indiv[a],
                            c_indiv[b],
                            active[a].expect("coupled agents have a segment").primitive,
                            t,
                        )
                    }
                    None => c_indiv[a],
                };
                if c_now != phys[a].c_unit {
                    let jolted = capacitance_jump(phys[a].body.potential_v, phys[a].c_unit, c_now)?;
                    phys[a].body.potential_v = jolted;
                    if let Some(b) = phys[a].partner {
                        phys[b].body.potential_v = jolted;
                    }
                }
                phys[a].c_unit = c_now;
                if let Some(b) = phys[a].partner {
                    phys[b].c_unit = c_now;
                }
                phys[a].body.capacitance_pf = c_indiv[a];
            }
        }

        // record, then let the front end pull everything back toward rest
        for (trace, p) in traces.iter_mut().zip(&phys) {
            trace.push(p.body.potential_v - AMBIENT_STATIC_POTENTIAL_V);
        }
        for p in &mut phys {
            let deviation = p.body.potential_v - AMBIENT_STATIC_POTENTIAL_V;
            p.body.potential_v = AMBIENT_STATIC_POTENTIAL_V + relax(deviation, config, dt)?;
        }
    }

    // per-agent measurement pass: noise and accelerometer channels
    let accel_noise_g = config.noise_std_mv * ACCEL_NOISE_G_PER_MV;
    let mut sessions = Vec::with_capacity(n_agents);
    for (a, agent) in script.agents.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(
            config
                .seed
                .wrapping_add((a as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let mut draw = |sigma: f64| -> f64 {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        };
        let mut cursor = SegmentCursor::new(script.segments_for(&agent.id));
        let mut potential_mv = Vec::with_capacity(n_samples);
        let mut accel_wrist = Vec::with_capacity(n_samples);
        let mut accel_calf = Vec::with_capacity(n_samples);
        for (i, &volts) in traces[a].iter().enumerate() {
            let t = i as f64 * dt;
            let seg = cursor.active_at(t);
            potential_mv.push(volts * 1e3 + draw(config.noise_std_mv));
            let w = wrist_template(seg, t);
            accel_wrist.push([
                w[0] + draw(accel_noise_g),
                w[1] + draw(accel_noise_g),
                w[2] + draw(accel_noise_g),
            ]);
            let c = calf_template(seg, t);
            accel_calf.push([
                c[0] + draw(accel_noise_g),
                c[1] + draw(accel_noise_g),
                c[2] + draw(accel_noise_g),
            ]);
        }
        let session = SessionData {
            agent_id: agent.id.clone(),
            group_id: agent.group,
            day_index: agent.day,
            sample_rate_hz: rate,
            potential_mv,
            accel_wrist,
            accel_calf,
            valid: vec![true; n_samples],
            labels: script.label_intervals_for(&agent.id),
        };
        session.validate()?;
        sessions.push(session);
    }
    Ok(sessions)
}
