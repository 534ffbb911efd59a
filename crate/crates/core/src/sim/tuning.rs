//! Combat tuning: the damage/range/duration tables behind the simulator.
//!
//! The defaults below are the committed baseline; they can be overridden by
//! a JSON file (see [`CombatTuning::from_json`]) pointed at by the CLI's
//! `STYLEMARK_CONFIG` environment variable. Durations are in seconds and
//! are converted to frames at the configured fps (rounded, minimum 1).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Current tuning file schema version.
pub const TUNING_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TuningError {
    #[error("tuning file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported tuning schema_version {0} (expected {TUNING_SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("invalid tuning: {0}")]
    Invalid(String),
}

/// Range/damage/timing of one attack type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    /// Maximum distance (arena units) at which the attack connects.
    pub range: f64,
    /// Health removed on a clean hit.
    pub damage: u32,
    /// Total animation length in seconds.
    pub duration_seconds: f64,
    /// Offset of the contact check within the animation, in seconds.
    pub hit_at_seconds: f64,
}

/// Full combat tuning table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombatTuning {
    pub schema_version: u32,
    /// Walking speed in arena units per second.
    pub move_speed: f64,
    /// Length of one walk command before the agent must re-decide.
    pub walk_step_seconds: f64,
    /// Length of an explicitly chosen idle stance.
    pub idle_hold_seconds: f64,
    pub jump_seconds: f64,
    pub crouch_seconds: f64,
    pub block_seconds: f64,
    pub hitstun_seconds: f64,
    pub knockdown_seconds: f64,
    pub light: AttackSpec,
    pub heavy: AttackSpec,
    /// Combo follow-up: only available right after a landed attack; knocks
    /// the opponent down on a clean hit.
    pub combo: AttackSpec,
    /// Longest chain of consecutive landed attacks that can be extended by
    /// combo follow-ups.
    pub max_combo_chain: u32,
    /// How far a clean hit shoves the victim back (arena units).
    pub hit_pushback: f64,
    /// How far a knockdown shoves the victim back.
    pub knockdown_pushback: f64,
    /// Fraction of initial health below which the rule table retreats.
    pub retreat_health_fraction: f64,
    /// Closest the two fighters can stand.
    pub min_gap: f64,
    /// Initial distance of each fighter from their arena edge.
    pub start_offset: f64,
}

impl Default for CombatTuning {
    fn default() -> Self {
        Self {
            schema_version: TUNING_SCHEMA_VERSION,
            move_speed: 3.0,
            walk_step_seconds: 1.0 / 15.0,
            idle_hold_seconds: 1.0 / 15.0,
            jump_seconds: 0.5,
            crouch_seconds: 0.25,
            block_seconds: 0.2,
            hitstun_seconds: 0.18,
            knockdown_seconds: 0.45,
            light: AttackSpec {
                range: 1.2,
                damage: 1,
                duration_seconds: 0.3,
                hit_at_seconds: 0.1,
            },
            heavy: AttackSpec {
                range: 1.5,
                damage: 1,
                duration_seconds: 0.5,
                hit_at_seconds: 0.18,
            },
            combo: AttackSpec {
                range: 1.6,
                damage: 1,
                duration_seconds: 0.35,
                hit_at_seconds: 0.08,
            },
            max_combo_chain: 3,
            hit_pushback: 0.8,
            knockdown_pushback: 1.4,
            retreat_health_fraction: 0.15,
            min_gap: 0.5,
            start_offset: 2.0,
        }
    }
}

impl CombatTuning {
    pub fn validate(&self) -> Result<(), TuningError> {
        if self.schema_version != TUNING_SCHEMA_VERSION {
            return Err(TuningError::SchemaVersion(self.schema_version));
        }
        let positive = [
            ("move_speed", self.move_speed),
            ("walk_step_seconds", self.walk_step_seconds),
            ("idle_hold_seconds", self.idle_hold_seconds),
            ("jump_seconds", self.jump_seconds),
            ("crouch_seconds", self.crouch_seconds),
            ("block_seconds", self.block_seconds),
            ("hitstun_seconds", self.hitstun_seconds),
            ("knockdown_seconds", self.knockdown_seconds),
            ("min_gap", self.min_gap),
            ("start_offset", self.start_offset),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(TuningError::Invalid(format!("{name} must be > 0")));
            }
        }
        for (name, value) in [
            ("hit_pushback", self.hit_pushback),
            ("knockdown_pushback", self.knockdown_pushback),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(TuningError::Invalid(format!("{name} must be >= 0")));
            }
        }
        if !(0.0..=1.0).contains(&self.retreat_health_fraction) {
            return Err(TuningError::Invalid(
                "retreat_health_fraction must be in [0, 1]".into(),
            ));
        }
        for (name, atk) in [("light", &self.light), ("heavy", &self.heavy), ("combo", &self.combo)]
        {
            if !(atk.range.is_finite() && atk.range > 0.0) {
                return Err(TuningError::Invalid(format!("{name}.range must be > 0")));
            }
            if !(atk.duration_seconds.is_finite() && atk.duration_seconds > 0.0) {
                return Err(TuningError::Invalid(format!(
                    "{name}.duration_seconds must be > 0"
                )));
            }
            if !(atk.hit_at_seconds.is_finite()
                && atk.hit_at_seconds >= 0.0
                && atk.hit_at_seconds <= atk.duration_seconds)
            {
                return Err(TuningError::Invalid(format!(
                    "{name}.hit_at_seconds must be within the animation"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, TuningError> {
        let tuning: CombatTuning = serde_json::from_str(text)?;
        tuning.validate()?;
        Ok(tuning)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tuning serializes infallibly")
    }
}

/// Seconds to frames at the given fps; never less than one frame.
pub(crate) fn frames(seconds: f64, fps: u32) -> u32 {
    ((seconds * f64::from(fps)).round() as u32).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        CombatTuning::default().validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let tuning = CombatTuning::default();
        let parsed = CombatTuning::from_json(&tuning.to_json()).unwrap();
        assert_eq!(parsed, tuning);
    }

    #[test]
    fn rejects_hit_frame_outside_animation() {
        let mut tuning = CombatTuning::default();
        tuning.light.hit_at_seconds = tuning.light.duration_seconds + 1.0;
        assert!(tuning.validate().is_err());
    }

    #[test]
    fn frame_conversion_rounds_and_floors_at_one() {
        assert_eq!(frames(0.3, 60), 18);
        assert_eq!(frames(0.001, 60), 1);
        assert_eq!(frames(1.0 / 15.0, 60), 4);
    }
}
