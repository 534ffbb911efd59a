//! Frame-granular 1-D combat: agent decision making and physics resolution.
//!
//! The agents are an original re-creation of a rule-driven fighting AI,
//! honoring five documented parameter semantics (see [`AgentPreset`]):
//! decision and action cooldowns gate when a new command may be issued,
//! rule compliance balances a fixed rule table against uniform randomness,
//! aggressiveness balances attacks against basic moves, and combo efficiency
//! is the probability of chaining a follow-up after a landed attack.
//!
//! The rule table priority is fixed: block an inbound attack, else attack
//! when in range, else retreat at low health, else advance.

use super::rng::SplitMix64;
use super::tuning::{frames, AttackSpec, CombatTuning};
use crate::recording::ActionTriple;

/// Cooldown seconds to frames; unlike activity durations, zero stays zero.
fn cooldown_frames(seconds: f64, fps: u32) -> u32 {
    (seconds * f64::from(fps)).round() as u32
}

fn hit_frame(spec: &AttackSpec, fps: u32) -> u32 {
    cooldown_frames(spec.hit_at_seconds, fps).min(frames(spec.duration_seconds, fps) - 1)
}

/// The five agent parameters. The built-in presets carry the standard
/// values for the five skill levels from very-easy to very-hard.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AgentPreset {
    pub name: String,
    /// Minimum time taken to formulate a decision (seconds).
    pub time_between_decisions: f64,
    /// Time between executing each decision (seconds).
    pub time_between_actions: f64,
    /// Balance between systematic rule application and randomness; higher
    /// means less randomness. In [0, 1].
    pub rule_compliance: f64,
    /// Balance between basic moves (walk, crouch, jump) and attacks; higher
    /// means more attacking. In [0, 1].
    pub aggressiveness: f64,
    /// Probability of attempting a combo follow-up after a landed attack.
    /// In [0, 1].
    pub combo_efficiency: f64,
}

impl AgentPreset {
    pub fn new(
        name: impl Into<String>,
        time_between_decisions: f64,
        time_between_actions: f64,
        rule_compliance: f64,
        aggressiveness: f64,
        combo_efficiency: f64,
    ) -> Self {
        Self {
            name: name.into(),
            time_between_decisions,
            time_between_actions,
            rule_compliance,
            aggressiveness,
            combo_efficiency,
        }
    }

    /// The five built-in skill presets.
    pub fn builtins() -> Vec<AgentPreset> {
        vec![
            AgentPreset::new("very-easy", 0.4, 0.1, 0.9, 0.1, 0.1),
            AgentPreset::new("easy", 0.3, 0.1, 0.9, 0.3, 0.2),
            AgentPreset::new("normal", 0.0, 0.05, 0.9, 0.5, 1.0),
            AgentPreset::new("hard", 0.1, 0.05, 0.9, 0.6, 1.0),
            AgentPreset::new("very-hard", 0.0, 0.05, 0.9, 0.6, 1.0),
        ]
    }

    pub fn builtin(name: &str) -> Option<AgentPreset> {
        Self::builtins().into_iter().find(|p| p.name == name)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.name.is_empty() {
            return Err("preset name must not be empty".into());
        }
        for (field, value) in [
            ("time_between_decisions", self.time_between_decisions),
            ("time_between_actions", self.time_between_actions),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(format!("{field} must be >= 0"));
            }
        }
        for (field, value) in [
            ("rule_compliance", self.rule_compliance),
            ("aggressiveness", self.aggressiveness),
            ("combo_efficiency", self.combo_efficiency),
        ] {
            if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
                return Err(format!("{field} must be in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Simulation-wide configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimConfig {
    pub fps: u32,
    pub round_limit_seconds: u32,
    pub rounds_per_match: u32,
    pub arena_width: f64,
    pub initial_health: u32,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            fps: 60,
            round_limit_seconds: 100,
            rounds_per_match: 2,
            arena_width: 8.0,
            initial_health: 100,
            seed: 42,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.fps == 0 {
            return Err("fps must be >= 1".into());
        }
        if self.round_limit_seconds == 0 {
            return Err("round_limit_seconds must be >= 1".into());
        }
        if self.rounds_per_match == 0 {
            return Err("rounds_per_match must be >= 1".into());
        }
        if !(self.arena_width.is_finite() && self.arena_width > 0.0) {
            return Err("arena_width must be > 0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    Light,
    Heavy,
    /// Only reachable as a follow-up to a landed attack; knocks down.
    Combo,
}

/// What a fighter's body is doing right now.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Idle,
    WalkForward,
    WalkBack,
    Jump,
    Crouch,
    Block,
    Attack(AttackKind),
    Hitstun,
    Knockdown,
}

/// Command chosen by an agent for this frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionCommand {
    /// Keep the current activity (busy, or gated by a cooldown).
    Continue,
    Idle,
    WalkForward,
    WalkBack,
    Jump,
    Crouch,
    Block,
    Attack(AttackKind),
}

#[derive(Debug, Clone)]
pub struct FighterState {
    pub x: f64,
    pub health: u32,
    pub activity: Activity,
    /// Frames remaining in the current activity; 0 means free to act.
    pub frames_left: u32,
    /// Frames since the current activity started.
    pub activity_age: u32,
    pub decision_cooldown: u32,
    pub action_cooldown: u32,
    /// Consecutive landed attacks in the current chain.
    pub combo_chain: u32,
    /// The last attack landed and the follow-up roll has not been taken yet.
    pub combo_pending: bool,
    attack_landed: bool,
}

impl FighterState {
    fn new(x: f64, health: u32) -> Self {
        Self {
            x,
            health,
            activity: Activity::Idle,
            frames_left: 0,
            activity_age: 0,
            decision_cooldown: 0,
            action_cooldown: 0,
            combo_chain: 0,
            combo_pending: false,
            attack_landed: false,
        }
    }
}

/// Full combat state of one round.
#[derive(Debug, Clone)]
pub struct CombatState {
    pub fighters: [FighterState; 2],
    pub frames_elapsed: u32,
    pub initial_health: u32,
}

impl CombatState {
    pub fn new(config: &SimConfig, tuning: &CombatTuning) -> Self {
        Self {
            fighters: [
                FighterState::new(tuning.start_offset, config.initial_health),
                FighterState::new(config.arena_width - tuning.start_offset, config.initial_health),
            ],
            frames_elapsed: 0,
            initial_health: config.initial_health,
        }
    }

    /// The observable action triple for one fighter.
    pub fn triple(&self, side: usize) -> ActionTriple {
        let (state, sub_state, basic_move) = match self.fighters[side].activity {
            Activity::Idle => ("Stand", "Resting", "Idle"),
            Activity::WalkForward => ("Stand", "Resting", "MoveForward"),
            Activity::WalkBack => ("Stand", "Resting", "MoveBack"),
            Activity::Jump => ("Jump", "Resting", "JumpStraight"),
            Activity::Crouch => ("Crouch", "Resting", "CrouchHold"),
            Activity::Block => ("Stand", "Blocking", "Idle"),
            Activity::Attack(AttackKind::Light) => ("Stand", "Resting", "LightAttack"),
            Activity::Attack(AttackKind::Heavy) => ("Stand", "Resting", "HeavyAttack"),
            Activity::Attack(AttackKind::Combo) => ("Stand", "Resting", "ComboFollowup"),
            Activity::Hitstun => ("Stand", "Stunned", "Hit"),
            Activity::Knockdown => ("Down", "Stunned", "KnockedDown"),
        };
        ActionTriple::new(state, sub_state, basic_move)
    }
}

impl CombatTuning {
    pub(crate) fn attack(&self, kind: AttackKind) -> &AttackSpec {
        match kind {
            AttackKind::Light => &self.light,
            AttackKind::Heavy => &self.heavy,
            AttackKind::Combo => &self.combo,
        }
    }
}

/// Chooses a command for one side at the current frame, updating that side's
/// cooldowns and combo bookkeeping. Returns [`ActionCommand::Continue`] while
/// the fighter is committed to an activity or gated by a cooldown.
///
/// Combo follow-ups are chained executions rather than fresh decisions: they
/// bypass the decision cooldown (but not the action cooldown), and the
/// follow-up roll happens exactly once per landed attack.
pub fn decide_action(
    state: &mut CombatState,
    side: usize,
    preset: &AgentPreset,
    tuning: &CombatTuning,
    fps: u32,
    rng: &mut SplitMix64,
) -> ActionCommand {
    if state.fighters[side].frames_left > 0 {
        return ActionCommand::Continue;
    }
    if state.fighters[side].combo_pending {
        let fighter = &mut state.fighters[side];
        fighter.combo_pending = false;
        let window_open =
            fighter.action_cooldown == 0 && fighter.combo_chain < tuning.max_combo_chain;
        if window_open && rng.chance(preset.combo_efficiency) {
            return issue(state, side, preset, tuning, fps, ActionCommand::Attack(AttackKind::Combo));
        }
    }
    {
        let fighter = &state.fighters[side];
        if fighter.decision_cooldown > 0 || fighter.action_cooldown > 0 {
            return ActionCommand::Continue;
        }
    }
    let command = if rng.chance(preset.rule_compliance) {
        rule_table(state, side, preset, tuning, fps, rng)
    } else {
        random_policy(preset, rng)
    };
    issue(state, side, preset, tuning, fps, command)
}

fn command_duration(command: ActionCommand, tuning: &CombatTuning, fps: u32) -> u32 {
    let seconds = match command {
        ActionCommand::Continue => return 0,
        ActionCommand::Idle => tuning.idle_hold_seconds,
        ActionCommand::WalkForward | ActionCommand::WalkBack => tuning.walk_step_seconds,
        ActionCommand::Jump => tuning.jump_seconds,
        ActionCommand::Crouch => tuning.crouch_seconds,
        ActionCommand::Block => tuning.block_seconds,
        ActionCommand::Attack(kind) => tuning.attack(kind).duration_seconds,
    };
    frames(seconds, fps)
}

/// The decision cooldown models thinking time: it runs from the end of the
/// commanded activity, so an agent with `time_between_decisions` t stands
/// idle for t seconds after each activity before its next decision. The
/// action cooldown runs from issue time as a plain execution-rate floor.
fn issue(
    state: &mut CombatState,
    side: usize,
    preset: &AgentPreset,
    tuning: &CombatTuning,
    fps: u32,
    command: ActionCommand,
) -> ActionCommand {
    let fighter = &mut state.fighters[side];
    fighter.decision_cooldown =
        command_duration(command, tuning, fps) + cooldown_frames(preset.time_between_decisions, fps);
    fighter.action_cooldown = cooldown_frames(preset.time_between_actions, fps);
    command
}

fn rule_table(
    state: &CombatState,
    side: usize,
    preset: &AgentPreset,
    tuning: &CombatTuning,
    fps: u32,
    rng: &mut SplitMix64,
) -> ActionCommand {
    let me = &state.fighters[side];
    let opp = &state.fighters[1 - side];
    let dist = (me.x - opp.x).abs();

    // 1. Block an inbound attack that can still reach us.
    if let Activity::Attack(kind) = opp.activity {
        let spec = tuning.attack(kind);
        if opp.activity_age <= hit_frame(spec, fps) && dist <= spec.range {
            return ActionCommand::Block;
        }
    }

    // 2. Intent roll: attacks are selected over basic moves with probability
    // aggressiveness. An aggressive intent always throws the attack — out of
    // range it whiffs as pressure — so a fighter's attack rate reflects its
    // own temperament rather than the opponent's spacing.
    let in_range = dist <= tuning.light.range;
    if preset.aggressiveness > 0.0 && rng.chance(preset.aggressiveness) {
        let kind = if rng.chance(preset.aggressiveness) {
            AttackKind::Heavy
        } else {
            AttackKind::Light
        };
        return ActionCommand::Attack(kind);
    }

    // 3. Basic-move intent: retreat at low health, advance when far, and
    // hold a crouching guard when close.
    let low_health =
        f64::from(me.health) < tuning.retreat_health_fraction * f64::from(state.initial_health);
    if low_health {
        ActionCommand::WalkBack
    } else if in_range {
        ActionCommand::Crouch
    } else {
        ActionCommand::WalkForward
    }
}

fn random_policy(preset: &AgentPreset, rng: &mut SplitMix64) -> ActionCommand {
    if rng.chance(preset.aggressiveness) {
        let kind = if rng.chance(preset.aggressiveness) {
            AttackKind::Heavy
        } else {
            AttackKind::Light
        };
        ActionCommand::Attack(kind)
    } else {
        match rng.pick(6) {
            0 => ActionCommand::Idle,
            1 => ActionCommand::WalkForward,
            2 => ActionCommand::WalkBack,
            3 => ActionCommand::Jump,
            4 => ActionCommand::Crouch,
            _ => ActionCommand::Block,
        }
    }
}

fn start_activity(fighter: &mut FighterState, command: ActionCommand, tuning: &CombatTuning, fps: u32) {
    let (activity, seconds) = match command {
        ActionCommand::Continue => return,
        ActionCommand::Idle => (Activity::Idle, tuning.idle_hold_seconds),
        ActionCommand::WalkForward => (Activity::WalkForward, tuning.walk_step_seconds),
        ActionCommand::WalkBack => (Activity::WalkBack, tuning.walk_step_seconds),
        ActionCommand::Jump => (Activity::Jump, tuning.jump_seconds),
        ActionCommand::Crouch => (Activity::Crouch, tuning.crouch_seconds),
        ActionCommand::Block => (Activity::Block, tuning.block_seconds),
        ActionCommand::Attack(kind) => {
            (Activity::Attack(kind), tuning.attack(kind).duration_seconds)
        }
    };
    fighter.activity = activity;
    fighter.frames_left = frames(seconds, fps);
    fighter.activity_age = 0;
    fighter.attack_landed = false;
}

/// What happened during one frame step.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepEvents {
    /// Per side: that side's attack landed this frame.
    pub landed: [bool; 2],
    /// Per side: that side's attack was blocked this frame.
    pub blocked: [bool; 2],
    /// Winner slot if the round ended by knockout this frame. On a
    /// simultaneous double knockout, slot 0 takes the round.
    pub winner: Option<usize>,
}

/// Advances the combat by one frame: starts the commanded activities, moves
/// fighters (clamped to the arena, never crossing), resolves attack contact
/// symmetrically, applies damage and stun, and ticks every timer.
pub fn step(
    state: &mut CombatState,
    commands: [ActionCommand; 2],
    config: &SimConfig,
    tuning: &CombatTuning,
) -> StepEvents {
    let fps = config.fps;

    for side in 0..2 {
        if commands[side] != ActionCommand::Continue {
            start_activity(&mut state.fighters[side], commands[side], tuning, fps);
        }
    }

    // Movement resolves against pre-movement positions so the order of the
    // two sides never matters. Closing movement stops at half the minimum
    // gap from the midpoint, which also prevents crossing.
    let pre_x = [state.fighters[0].x, state.fighters[1].x];
    let mid = (pre_x[0] + pre_x[1]) / 2.0;
    let dx = tuning.move_speed / f64::from(fps);
    for side in 0..2 {
        let toward = if pre_x[1 - side] >= pre_x[side] { 1.0 } else { -1.0 };
        let dir = match state.fighters[side].activity {
            Activity::WalkForward => toward,
            Activity::WalkBack => -toward,
            _ => 0.0,
        };
        if dir != 0.0 {
            let fighter = &mut state.fighters[side];
            let mut new_x = fighter.x + dir * dx;
            if dir == toward {
                let bound = mid - toward * tuning.min_gap / 2.0;
                new_x = if toward > 0.0 {
                    new_x.min(bound.max(fighter.x))
                } else {
                    new_x.max(bound.min(fighter.x))
                };
            }
            fighter.x = new_x.clamp(0.0, config.arena_width);
        }
    }

    // Contact: collect both sides' contact checks before applying either, so
    // simultaneous hits trade.
    let dist = (state.fighters[0].x - state.fighters[1].x).abs();
    let pre_activity = [state.fighters[0].activity, state.fighters[1].activity];
    let mut contact: [Option<AttackKind>; 2] = [None, None];
    for side in 0..2 {
        if let Activity::Attack(kind) = state.fighters[side].activity {
            if state.fighters[side].activity_age == hit_frame(tuning.attack(kind), fps) {
                contact[side] = Some(kind);
            }
        }
    }

    let mut events = StepEvents::default();
    for side in 0..2 {
        let Some(kind) = contact[side] else { continue };
        let spec = tuning.attack(kind);
        if dist > spec.range {
            continue; // whiff
        }
        match pre_activity[1 - side] {
            Activity::Block => {
                events.blocked[side] = true;
            }
            Activity::Knockdown => {} // invulnerable while down
            _ => {
                let (attacker, victim) = two_sides(&mut state.fighters, side);
                victim.health = victim.health.saturating_sub(spec.damage);
                let (activity, seconds, pushback) = if kind == AttackKind::Combo {
                    (Activity::Knockdown, tuning.knockdown_seconds, tuning.knockdown_pushback)
                } else {
                    (Activity::Hitstun, tuning.hitstun_seconds, tuning.hit_pushback)
                };
                let away = if attacker.x >= victim.x { -1.0 } else { 1.0 };
                victim.x = (victim.x + away * pushback).clamp(0.0, config.arena_width);
                victim.activity = activity;
                victim.frames_left = frames(seconds, fps);
                victim.activity_age = 0;
                victim.combo_pending = false;
                victim.combo_chain = 0;
                victim.attack_landed = false;
                attacker.attack_landed = true;
                attacker.combo_chain = if kind == AttackKind::Combo {
                    attacker.combo_chain + 1
                } else {
                    1
                };
                events.landed[side] = true;
            }
        }
    }

    // Knockout: the round ends the frame health reaches zero.
    let healths = [state.fighters[0].health, state.fighters[1].health];
    if healths[0] == 0 || healths[1] == 0 {
        events.winner = Some(if healths[1] == 0 && healths[0] > 0 {
            0
        } else if healths[0] == 0 && healths[1] > 0 {
            1
        } else {
            0
        });
        for fighter in &mut state.fighters {
            if fighter.health == 0 {
                fighter.activity = Activity::Knockdown;
                fighter.frames_left = frames(tuning.knockdown_seconds, fps);
                fighter.activity_age = 0;
            }
        }
    }
    events
}

/// Inter-frame bookkeeping, run after the frame's state has been observed:
/// retires finished activities and ticks cooldowns. Keeping this separate
/// from [`step`] means a fighter whose activity ends this frame is still
/// *observed* in that activity, and can act again on the very next frame —
/// no phantom idle frames between back-to-back actions.
pub fn end_frame(state: &mut CombatState) {
    for fighter in &mut state.fighters {
        if fighter.frames_left > 0 {
            fighter.frames_left -= 1;
            fighter.activity_age += 1;
            if fighter.frames_left == 0 {
                end_activity(fighter);
            }
        }
        if fighter.decision_cooldown > 0 {
            fighter.decision_cooldown -= 1;
        }
        if fighter.action_cooldown > 0 {
            fighter.action_cooldown -= 1;
        }
    }
    state.frames_elapsed += 1;
}

fn end_activity(fighter: &mut FighterState) {
    if let Activity::Attack(_) = fighter.activity {
        fighter.combo_pending = fighter.attack_landed;
        if !fighter.attack_landed {
            fighter.combo_chain = 0;
        }
        fighter.attack_landed = false;
    }
    fighter.activity = Activity::Idle;
    fighter.activity_age = 0;
}

fn two_sides(fighters: &mut [FighterState; 2], attacker: usize) -> (&mut FighterState, &mut FighterState) {
    let (left, right) = fighters.split_at_mut(1);
    if attacker == 0 {
        (&mut left[0], &mut right[0])
    } else {
        (&mut right[0], &mut left[0])
    }
}
