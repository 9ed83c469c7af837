//! Simulator tuning constants.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and sampling constants for session synthesis.
///
/// The capacitance values are desk-scale stand-ins, not calibrated
/// measurements; what matters downstream is their relative effect on the
/// potential channel (a larger total body capacitance damps the potential
/// swing caused by the same capacitance modulation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Potential the front end pulls the body back to, in volts.
    pub rest_potential_v: f64,
    /// Time constant of that pull, in seconds.
    pub relax_tau_s: f64,
    /// Body-to-environment capacitance of an unloaded, standing body (pF).
    pub base_capacitance_pf: f64,
    /// Capacitance swing contributed by one foot step (pF).
    pub step_delta_c_pf: f64,
    /// Extra capacitance while holding the metal load alone (pF).
    pub load_delta_c_pf: f64,
    /// Extra coupling capacitance when two bodies share a load, beyond the
    /// sum of their individual capacitances (pF).
    pub joint_extra_c_pf: f64,
    /// Standard deviation of measurement noise on the potential channel (mV).
    /// Accelerometer noise rides on the same knob (see `synth`).
    pub noise_std_mv: f64,
    /// Output sample rate (Hz).
    pub sample_rate_hz: f64,
    /// Seed for all measurement-noise streams.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            rest_potential_v: 0.0,
            relax_tau_s: 0.2,
            base_capacitance_pf: 100.0,
            step_delta_c_pf: 10.0,
            load_delta_c_pf: 100.0,
            joint_extra_c_pf: 50.0,
            noise_std_mv: 0.05,
            sample_rate_hz: 50.0,
            seed: 0,
        }
    }
}

impl SimConfig {
    /// Checks that every constant is usable before a run.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let positive = [
            ("relax_tau_s", self.relax_tau_s),
            ("base_capacitance_pf", self.base_capacitance_pf),
            ("sample_rate_hz", self.sample_rate_hz),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                problems.push(format!("{name} must be positive and finite, got {value}"));
            }
        }
        let non_negative = [
            ("step_delta_c_pf", self.step_delta_c_pf),
            ("load_delta_c_pf", self.load_delta_c_pf),
            ("joint_extra_c_pf", self.joint_extra_c_pf),
            ("noise_std_mv", self.noise_std_mv),
        ];
        for (name, value) in non_negative {
            if !value.is_finite() || value < 0.0 {
                problems.push(format!("{name} must be non-negative and finite, got {value}"));
            }
        }
        if !self.rest_potential_v.is_finite() {
            problems.push(format!(
                "rest_potential_v must be finite, got {}",
                self.rest_potential_v
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Loads a config from a TOML file. Keys not listed in [`SimConfig`] are
    /// rejected; omitted keys fall back to the defaults.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let config: SimConfig = toml::from_str(&text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive_rate() {
        let cfg = SimConfig {
            sample_rate_hz: 0.0,
            ..SimConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
