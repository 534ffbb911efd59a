//! Deterministic 1-vs-1 arena simulation.
//!
//! `(presets, config, seed)` fully determine every emitted byte. Each match
//! gets its own derived seed (see [`rng`]), so matches of a tournament can
//! run in any order — or in parallel — and still produce identical files.

mod combat;
pub mod rng;
mod tuning;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recording::{
    Alphabets, FrameSnapshot, MatchRecording, PlayerFrame, PlayerMeta, RecordingError, Round,
    RoundOutcome, RECORDING_SCHEMA_VERSION,
};

pub use combat::{
    decide_action, end_frame, step, ActionCommand, Activity, AgentPreset, AttackKind, CombatState,
    FighterState, SimConfig, StepEvents,
};
pub use tuning::{AttackSpec, CombatTuning, TuningError, TUNING_SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("invalid preset {name:?}: {reason}")]
    InvalidPreset { name: String, reason: String },
    #[error("a tournament needs at least 2 presets (got {0})")]
    TooFewPresets(usize),
    #[error("duplicate preset name {0:?}")]
    DuplicatePreset(String),
    #[error(transparent)]
    Tuning(#[from] TuningError),
    #[error(transparent)]
    Recording(#[from] RecordingError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// The closed alphabets the simulator emits.
pub fn sim_alphabets() -> Alphabets {
    let to_vec = |tokens: &[&str]| tokens.iter().map(|t| t.to_string()).collect();
    Alphabets {
        state: to_vec(&["Stand", "Crouch", "Jump", "Down"]),
        sub_state: to_vec(&["Resting", "Blocking", "Stunned"]),
        basic_move: to_vec(&[
            "Idle",
            "MoveForward",
            "MoveBack",
            "JumpStraight",
            "CrouchHold",
            "LightAttack",
            "HeavyAttack",
            "ComboFollowup",
            "Hit",
            "KnockedDown",
        ]),
    }
}

/// Per-match counters, mostly for CLI summaries and behavioral tests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchStats {
    pub rounds: u32,
    pub knockouts: u32,
    /// Per side: commands other than `Continue`.
    pub decisions: [u64; 2],
    /// Per side: attack commands issued (combo follow-ups included).
    pub attack_commands: [u64; 2],
    /// Per side: attacks that landed.
    pub landed_hits: [u64; 2],
    /// Per side: attacks that were blocked by the opponent.
    pub blocked_attacks: [u64; 2],
    /// Total frames simulated across all rounds.
    pub frames: u64,
}

fn validate_inputs(
    a: &AgentPreset,
    b: &AgentPreset,
    config: &SimConfig,
    tuning: &CombatTuning,
) -> Result<(), SimError> {
    config
        .validate()
        .map_err(SimError::InvalidConfig)?;
    tuning.validate()?;
    if config.arena_width < 2.0 * tuning.start_offset + tuning.min_gap {
        return Err(SimError::InvalidConfig(format!(
            "arena_width {} too small for start_offset {} and min_gap {}",
            config.arena_width, tuning.start_offset, tuning.min_gap
        )));
    }
    for preset in [a, b] {
        preset.validate().map_err(|reason| SimError::InvalidPreset {
            name: preset.name.clone(),
            reason,
        })?;
    }
    Ok(())
}

fn simulate_round(
    a: &AgentPreset,
    b: &AgentPreset,
    config: &SimConfig,
    tuning: &CombatTuning,
    round_seed: u64,
    stats: &mut MatchStats,
) -> Round {
    let fps = config.fps;
    let limit = fps * config.round_limit_seconds;
    let mut state = CombatState::new(config, tuning);
    let mut rngs = [rng::side_stream(round_seed, 0), rng::side_stream(round_seed, 1)];
    let presets = [a, b];
    let mut frames = Vec::with_capacity(limit as usize);
    let mut outcome = RoundOutcome::Timeout;

    for frame_index in 0..limit {
        let mut commands = [ActionCommand::Continue; 2];
        for side in 0..2 {
            let cmd = decide_action(&mut state, side, presets[side], tuning, fps, &mut rngs[side]);
            if cmd != ActionCommand::Continue {
                stats.decisions[side] += 1;
                if matches!(cmd, ActionCommand::Attack(_)) {
                    stats.attack_commands[side] += 1;
                }
            }
            commands[side] = cmd;
        }
        let events = step(&mut state, commands, config, tuning);
        for side in 0..2 {
            stats.landed_hits[side] += u64::from(events.landed[side]);
            stats.blocked_attacks[side] += u64::from(events.blocked[side]);
        }
        // Positions are quantized to 1e-4 arena units in the telemetry;
        // internal combat state keeps full precision.
        let quantize = |x: f64| (x * 1e4).round() / 1e4;
        frames.push(FrameSnapshot {
            frame_index,
            players: [
                PlayerFrame {
                    action: state.triple(0),
                    health: state.fighters[0].health,
                    x: quantize(state.fighters[0].x),
                },
                PlayerFrame {
                    action: state.triple(1),
                    health: state.fighters[1].health,
                    x: quantize(state.fighters[1].x),
                },
            ],
        });
        stats.frames += 1;
        if let Some(winner) = events.winner {
            // A knockout on the very last scheduled frame records as a
            // timeout, so knockout rounds are always shorter than the limit.
            if frame_index + 1 < limit {
                outcome = RoundOutcome::Knockout(winner);
                stats.knockouts += 1;
                break;
            }
        }
        end_frame(&mut state);
    }
    stats.rounds += 1;
    Round { frames, outcome }
}

fn player_ids(a: &AgentPreset, b: &AgentPreset) -> [String; 2] {
    if a.name == b.name {
        [format!("{}-1", a.name), format!("{}-2", b.name)]
    } else {
        [a.name.clone(), b.name.clone()]
    }
}

fn simulate_match_inner(
    a: &AgentPreset,
    b: &AgentPreset,
    config: &SimConfig,
    tuning: &CombatTuning,
    match_id: String,
) -> Result<(MatchRecording, MatchStats), SimError> {
    validate_inputs(a, b, config, tuning)?;
    let mut stats = MatchStats::default();
    let mut rounds = Vec::with_capacity(config.rounds_per_match as usize);
    for round_index in 0..config.rounds_per_match {
        let round_seed = rng::round_seed(config.seed, round_index);
        rounds.push(simulate_round(a, b, config, tuning, round_seed, &mut stats));
    }
    let ids = player_ids(a, b);
    let recording = MatchRecording {
        schema_version: RECORDING_SCHEMA_VERSION,
        match_id,
        fps: config.fps,
        round_limit_seconds: config.round_limit_seconds,
        alphabets: sim_alphabets(),
        players: [
            PlayerMeta {
                id: ids[0].clone(),
                controller: format!("ai-{}", a.name),
            },
            PlayerMeta {
                id: ids[1].clone(),
                controller: format!("ai-{}", b.name),
            },
        ],
        rounds,
    };
    Ok((recording, stats))
}

/// Simulates one match. The result is fully determined by `(a, b, config)`;
/// `config.seed` is the match seed (round streams derive from it).
pub fn simulate_match(
    a: &AgentPreset,
    b: &AgentPreset,
    config: &SimConfig,
    tuning: &CombatTuning,
) -> Result<MatchRecording, SimError> {
    simulate_match_with_stats(a, b, config, tuning).map(|(rec, _)| rec)
}

/// [`simulate_match`] plus per-match counters.
pub fn simulate_match_with_stats(
    a: &AgentPreset,
    b: &AgentPreset,
    config: &SimConfig,
    tuning: &CombatTuning,
) -> Result<(MatchRecording, MatchStats), SimError> {
    simulate_match_inner(a, b, config, tuning, format!("{}-vs-{}", a.name, b.name))
}

/// One schedulable unit of a tournament: a single match with its derived
/// seed and output file name.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchJob {
    pub pair_index: usize,
    pub a: AgentPreset,
    pub b: AgentPreset,
    pub match_index: u32,
    /// Derived match seed: `rng::match_seed(base, a, b, match_index)`.
    pub seed: u64,
    pub file_name: String,
}

impl MatchJob {
    pub fn pair_name(&self) -> String {
        format!("{}-vs-{}", self.a.name, self.b.name)
    }

    pub fn match_id(&self) -> String {
        format!("{}_{:02}", self.pair_name(), self.match_index)
    }

    /// Runs the job. Independent of every other job, so jobs may execute on
    /// any thread in any order.
    pub fn run(
        &self,
        config: &SimConfig,
        tuning: &CombatTuning,
    ) -> Result<(MatchRecording, MatchStats), SimError> {
        let mut match_config = config.clone();
        match_config.seed = self.seed;
        simulate_match_inner(&self.a, &self.b, &match_config, tuning, self.match_id())
    }
}

/// Expands presets into the full unordered-pair schedule: every distinct
/// pair, `matches_per_pair` matches each, seeds derived from `config.seed`.
pub fn tournament_jobs(
    presets: &[AgentPreset],
    matches_per_pair: u32,
    config: &SimConfig,
) -> Result<Vec<MatchJob>, SimError> {
    if presets.len() < 2 {
        return Err(SimError::TooFewPresets(presets.len()));
    }
    for (i, preset) in presets.iter().enumerate() {
        preset.validate().map_err(|reason| SimError::InvalidPreset {
            name: preset.name.clone(),
            reason,
        })?;
        if presets[..i].iter().any(|p| p.name == preset.name) {
            return Err(SimError::DuplicatePreset(preset.name.clone()));
        }
    }
    let mut jobs = Vec::new();
    let mut pair_index = 0;
    for i in 0..presets.len() {
        for j in (i + 1)..presets.len() {
            let (a, b) = (&presets[i], &presets[j]);
            for match_index in 0..matches_per_pair {
                let seed = rng::match_seed(config.seed, &a.name, &b.name, match_index);
                jobs.push(MatchJob {
                    pair_index,
                    a: a.clone(),
                    b: b.clone(),
                    match_index,
                    seed,
                    file_name: format!("{}-vs-{}_{:02}.jsonl", a.name, b.name, match_index),
                });
            }
            pair_index += 1;
        }
    }
    Ok(jobs)
}

/// Manifest entry for one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestMatch {
    pub index: u32,
    pub file: String,
    pub seed: u64,
}

/// Manifest entry for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestPair {
    pub pair: String,
    pub a: String,
    pub b: String,
    pub matches: Vec<ManifestMatch>,
}

/// `manifest.json`: the full schedule of a tournament run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentManifest {
    pub schema_version: u32,
    pub config: SimConfig,
    pub matches_per_pair: u32,
    pub pairs: Vec<ManifestPair>,
}

impl TournamentManifest {
    pub fn from_jobs(jobs: &[MatchJob], config: &SimConfig, matches_per_pair: u32) -> Self {
        let mut pairs: Vec<ManifestPair> = Vec::new();
        for job in jobs {
            if pairs.len() <= job.pair_index {
                pairs.push(ManifestPair {
                    pair: job.pair_name(),
                    a: job.a.name.clone(),
                    b: job.b.name.clone(),
                    matches: Vec::new(),
                });
            }
            pairs[job.pair_index].matches.push(ManifestMatch {
                index: job.match_index,
                file: job.file_name.clone(),
                seed: job.seed,
            });
        }
        Self {
            schema_version: 1,
            config: config.clone(),
            matches_per_pair,
            pairs,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes infallibly")
    }

    pub fn file_names(&self) -> impl Iterator<Item = &str> {
        self.pairs
            .iter()
            .flat_map(|p| p.matches.iter().map(|m| m.file.as_str()))
    }
}

/// Writes `bytes` to `path` atomically (temp file in the same directory,
/// then rename), so failures never leave partial outputs behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SimError> {
    let io_err = |source| SimError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp).map_err(|source| SimError::Io {
            path: tmp.clone(),
            source,
        })?;
        file.write_all(bytes).map_err(|source| SimError::Io {
            path: tmp.clone(),
            source,
        })?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Runs a full round-robin tournament sequentially, writing one JSONL
/// recording per match plus `manifest.json` into `out_dir`.
///
/// Returns the manifest and accumulated stats. The CLI parallelizes by
/// distributing [`tournament_jobs`] over threads instead of calling this;
/// both paths produce identical bytes.
pub fn run_tournament(
    presets: &[AgentPreset],
    matches_per_pair: u32,
    config: &SimConfig,
    tuning: &CombatTuning,
    out_dir: &Path,
) -> Result<(TournamentManifest, MatchStats), SimError> {
    let jobs = tournament_jobs(presets, matches_per_pair, config)?;
    std::fs::create_dir_all(out_dir).map_err(|source| SimError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut totals = MatchStats::default();
    for job in &jobs {
        let (recording, stats) = job.run(config, tuning)?;
        let bytes = crate::recording::write_recording(&recording)?;
        write_atomic(&out_dir.join(&job.file_name), &bytes)?;
        totals.rounds += stats.rounds;
        totals.knockouts += stats.knockouts;
        totals.frames += stats.frames;
        for side in 0..2 {
            totals.decisions[side] += stats.decisions[side];
            totals.attack_commands[side] += stats.attack_commands[side];
            totals.landed_hits[side] += stats.landed_hits[side];
            totals.blocked_attacks[side] += stats.blocked_attacks[side];
        }
    }
    let manifest = TournamentManifest::from_jobs(&jobs, config, matches_per_pair);
    write_atomic(&out_dir.join("manifest.json"), manifest.to_json().as_bytes())?;
    Ok((manifest, totals))
}
