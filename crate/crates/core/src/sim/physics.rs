//! Electrostatic primitives behind the potential channel.
//!
//! The model is a body held near a rest potential by a charging front end.
//! Three things can happen to it:
//!
//! * two (or more) bodies touch a shared conductor and their charge pools
//!   merge ([`charge_share`]),
//! * the body's capacitance to the environment changes while its charge has
//!   no time to move, so the potential jumps ([`capacitance_jump`]),
//! * between events, the front end pulls the potential back to rest with an
//!   RC-style exponential ([`relax`]).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sim::SimConfig;

/// Electrical state of one body at an instant.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    /// Capacitance to the environment, picofarads. Always positive.
    pub capacitance_pf: f64,
    /// Potential in volts.
    pub potential_v: f64,
    /// Agents this body is currently conductively coupled with. Kept
    /// symmetric by the synthesiser: `a in b.coupled_with` iff
    /// `b in a.coupled_with`.
    pub coupled_with: BTreeSet<String>,
}

impl BodyState {
    pub fn new(capacitance_pf: f64, potential_v: f64) -> Result<Self> {
        if !capacitance_pf.is_finite() || capacitance_pf <= 0.0 {
            return Err(Error::invalid(format!(
                "body capacitance must be positive and finite, got {capacitance_pf} pF"
            )));
        }
        if !potential_v.is_finite() {
            return Err(Error::invalid(format!(
                "body potential must be finite, got {potential_v} V"
            )));
        }
        Ok(BodyState {
            capacitance_pf,
            potential_v,
            coupled_with: BTreeSet::new(),
        })
    }
}

/// Potential shared by a set of bodies the moment they become one conductor.
///
/// Charge is conserved: the merged potential is the capacitance-weighted mean
/// `sum(C_i * V_i) / sum(C_i)`, so `sum(C_i) * result` equals the total
/// charge going in.
pub fn charge_share(states: &[BodyState]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::invalid("charge_share needs at least one body"));
    }
    let mut charge = 0.0;
    let mut capacitance = 0.0;
    for (i, s) in states.iter().enumerate() {
        if !s.capacitance_pf.is_finite() || s.capacitance_pf <= 0.0 {
            return Err(Error::invalid(format!(
                "body {i} has non-positive capacitance {} pF",
                s.capacitance_pf
            )));
        }
        charge += s.capacitance_pf * s.potential_v;
        capacitance += s.capacitance_pf;
    }
    Ok(charge / capacitance)
}

/// Instantaneous potential after the capacitance changes under conserved
/// charge: `V * C_old / C_new`.
pub fn capacitance_jump(potential_v: f64, c_old_pf: f64, c_new_pf: f64) -> Result<f64> {
    for (name, c) in [("old", c_old_pf), ("new", c_new_pf)] {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::invalid(format!(
                "{name} capacitance must be positive and finite, got {c} pF"
            )));
        }
    }
    Ok(potential_v * c_old_pf / c_new_pf)
}

/// Exponential pull back to the rest potential over `dt_s` seconds:
/// `VS + (V - VS) * exp(-dt / tau)`.
pub fn relax(potential_v: f64, config: &SimConfig, dt_s: f64) -> Result<f64> {
    if !dt_s.is_finite() || dt_s < 0.0 {
        return Err(Error::invalid(format!(
            "relaxation interval must be non-negative, got {dt_s} s"
        )));
    }
    let vs = config.rest_potential_v;
    Ok(vs + (potential_v - vs) * (-dt_s / config.relax_tau_s).exp())
}
