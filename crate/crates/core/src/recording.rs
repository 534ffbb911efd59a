//! Telemetry data model and the on-disk recording format.
//!
//! A recording is UTF-8 JSONL: one header object, then one object per frame,
//! with a round-outcome object closing each round. Serialization is canonical
//! (fixed key order, shortest round-trip floats), so `write ∘ parse ∘ write`
//! is a fixed point and recordings can be diffed and checksummed.
//!
//! Action identity is the triple (state, sub-state, basic move). The triple
//! alphabets are declared in the header rather than hard-coded, so captured
//! logs with richer state sets than the built-in simulator remain parseable.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Current recording schema version. Parsers reject anything else.
pub const RECORDING_SCHEMA_VERSION: u32 = 1;

/// Errors raised while parsing, validating or serializing recordings.
///
/// Parse errors carry the 1-based line number of the offending JSONL line.
#[derive(Debug, Error)]
pub enum RecordingError {
    #[error("line {line}: malformed line: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: unknown {kind} token {token:?} (not in header alphabet)")]
    UnknownToken {
        line: usize,
        kind: &'static str,
        token: String,
    },
    #[error("line {line}: non-monotonic frame_index: expected {expected}, found {found}")]
    NonMonotonicFrame {
        line: usize,
        expected: u32,
        found: u32,
    },
    #[error("line {line}: player count must be 2 (found {found})")]
    PlayerCount { line: usize, found: usize },
    #[error("line {line}: health increased for player {player} within a round ({from} -> {to})")]
    HealthIncrease {
        line: usize,
        player: String,
        from: u32,
        to: u32,
    },
    #[error("line {line}: frame belongs to round {found}, expected round {expected}")]
    RoundIndex {
        line: usize,
        expected: u32,
        found: u32,
    },
    #[error(
        "line {line}: round {round} has {frames} frames, exceeding fps x round_limit_seconds = {cap}"
    )]
    TooManyFrames {
        line: usize,
        round: u32,
        frames: u32,
        cap: u32,
    },
    #[error(
        "line {line}: timeout round {round} has {frames} frames, expected exactly fps x round_limit_seconds = {cap}"
    )]
    ShortTimeoutRound {
        line: usize,
        round: u32,
        frames: u32,
        cap: u32,
    },
    #[error("line {line}: round {round} closed with no frames")]
    EmptyRound { line: usize, round: u32 },
    #[error("recording ends mid-round: round {round} has no outcome line")]
    UnterminatedRound { round: u32 },
    #[error("recording has no header line")]
    MissingHeader,
    #[error("recording must contain at least one round")]
    NoRounds,
    #[error("unsupported schema_version {0} (expected {RECORDING_SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("invalid header: {0}")]
    InvalidHeader(String),
    #[error("alphabet {kind:?} contains invalid token {token:?}: {reason}")]
    InvalidAlphabetToken {
        kind: &'static str,
        token: String,
        reason: String,
    },
    #[error("unknown player id {0:?}")]
    UnknownPlayer(String),
    #[error("recording is not valid UTF-8: {0}")]
    Utf8(#[from] std::str::Utf8Error),
}

/// The (state, sub-state, basic move) identity of one player action.
///
/// Equality is component-wise; the triple is the sole identity of an action.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionTriple {
    pub state: String,
    pub sub_state: String,
    pub basic_move: String,
}

impl ActionTriple {
    pub fn new(
        state: impl Into<String>,
        sub_state: impl Into<String>,
        basic_move: impl Into<String>,
    ) -> Self {
        Self {
            state: state.into(),
            sub_state: sub_state.into(),
            basic_move: basic_move.into(),
        }
    }

    /// Canonical `state/sub_state/basic_move` encoding, used in fingerprint keys.
    pub fn canonical_key(&self) -> String {
        format!("{}/{}/{}", self.state, self.sub_state, self.basic_move)
    }

    /// Inverse of [`canonical_key`](Self::canonical_key).
    pub fn parse_key(key: &str) -> Option<Self> {
        let mut parts = key.split('/');
        let state = parts.next()?;
        let sub_state = parts.next()?;
        let basic_move = parts.next()?;
        if parts.next().is_some() || state.is_empty() || sub_state.is_empty() || basic_move.is_empty()
        {
            return None;
        }
        Some(Self::new(state, sub_state, basic_move))
    }
}

impl fmt::Display for ActionTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_key())
    }
}

/// The closed token alphabets a recording draws its action triples from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabets {
    pub state: Vec<String>,
    pub sub_state: Vec<String>,
    pub basic_move: Vec<String>,
}

impl Alphabets {
    /// Token rules: nonempty, no control characters, and none of `/ |`
    /// (reserved by the canonical fingerprint key encoding).
    fn validate_tokens(kind: &'static str, tokens: &[String]) -> Result<(), RecordingError> {
        if tokens.is_empty() {
            return Err(RecordingError::InvalidHeader(format!(
                "alphabet {kind:?} is empty"
            )));
        }
        let mut seen = BTreeSet::new();
        for token in tokens {
            let reason = if token.is_empty() {
                Some("empty token".to_string())
            } else if token.chars().any(|c| c.is_control()) {
                Some("control character".to_string())
            } else if token.contains('/') || token.contains('|') {
                Some("'/' and '|' are reserved separators".to_string())
            } else if !seen.insert(token) {
                Some("duplicate token".to_string())
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(RecordingError::InvalidAlphabetToken {
                    kind,
                    token: token.clone(),
                    reason,
                });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), RecordingError> {
        Self::validate_tokens("state", &self.state)?;
        Self::validate_tokens("sub_state", &self.sub_state)?;
        Self::validate_tokens("basic_move", &self.basic_move)
    }

    pub fn contains(&self, triple: &ActionTriple) -> bool {
        self.state.iter().any(|t| *t == triple.state)
            && self.sub_state.iter().any(|t| *t == triple.sub_state)
            && self.basic_move.iter().any(|t| *t == triple.basic_move)
    }
}

/// Identity and controller of one participant.
///
/// `controller` is `"human"` for captured human play, or the agent preset
/// name prefixed with `ai-` (e.g. `"ai-normal"`) for simulated play.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerMeta {
    pub id: String,
    pub controller: String,
}

/// One player's slice of a frame snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerFrame {
    pub action: ActionTriple,
    pub health: u32,
    pub x: f64,
}

/// Engine state snapshot for one simulation frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSnapshot {
    /// 0-based, strictly increasing by 1 within a round.
    pub frame_index: u32,
    pub players: [PlayerFrame; 2],
}

/// How a round ended. Timeouts are draws; a knockout names the winner slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundOutcome {
    /// Knockout won by player slot 0 or 1.
    Knockout(usize),
    Timeout,
}

impl RoundOutcome {
    fn as_wire(&self) -> &'static str {
        match self {
            RoundOutcome::Knockout(0) => "ko:p1",
            RoundOutcome::Knockout(_) => "ko:p2",
            RoundOutcome::Timeout => "timeout",
        }
    }

    fn from_wire(s: &str) -> Option<Self> {
        match s {
            "ko:p1" => Some(RoundOutcome::Knockout(0)),
            "ko:p2" => Some(RoundOutcome::Knockout(1)),
            "timeout" => Some(RoundOutcome::Timeout),
            _ => None,
        }
    }
}

/// Frames and outcome of a single round.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub frames: Vec<FrameSnapshot>,
    pub outcome: RoundOutcome,
}

/// A full match: header metadata plus per-round frame streams.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchRecording {
    pub schema_version: u32,
    pub match_id: String,
    pub fps: u32,
    pub round_limit_seconds: u32,
    pub alphabets: Alphabets,
    pub players: [PlayerMeta; 2],
    pub rounds: Vec<Round>,
}

impl MatchRecording {
    /// Seconds since round start for a frame index (timestamps are derived,
    /// never stored).
    pub fn sim_time(&self, frame_index: u32) -> f64 {
        f64::from(frame_index) / f64::from(self.fps)
    }

    /// Maximum frames a round may contain.
    pub fn frame_cap(&self) -> u32 {
        self.fps * self.round_limit_seconds
    }

    pub fn player_slot(&self, player_id: &str) -> Option<usize> {
        self.players.iter().position(|p| p.id == player_id)
    }

    /// Id of the opponent of `player_id`, if the player participates.
    pub fn opponent_of(&self, player_id: &str) -> Option<&str> {
        self.player_slot(player_id)
            .map(|slot| self.players[1 - slot].id.as_str())
    }

    /// Checks every structural invariant the parser enforces, so recordings
    /// built in memory go through the same gate before being written.
    pub fn validate(&self) -> Result<(), RecordingError> {
        if self.schema_version != RECORDING_SCHEMA_VERSION {
            return Err(RecordingError::SchemaVersion(self.schema_version));
        }
        if self.fps == 0 {
            return Err(RecordingError::InvalidHeader("fps must be >= 1".into()));
        }
        if self.round_limit_seconds == 0 {
            return Err(RecordingError::InvalidHeader(
                "round_limit_seconds must be >= 1".into(),
            ));
        }
        self.alphabets.validate()?;
        if self.players[0].id == self.players[1].id {
            return Err(RecordingError::InvalidHeader(format!(
                "duplicate player id {:?}",
                self.players[0].id
            )));
        }
        if self.rounds.is_empty() {
            return Err(RecordingError::NoRounds);
        }
        let cap = self.frame_cap();
        for (round_index, round) in self.rounds.iter().enumerate() {
            let round_index = round_index as u32;
            if round.frames.is_empty() {
                return Err(RecordingError::EmptyRound {
                    line: 0,
                    round: round_index,
                });
            }
            let frames = round.frames.len() as u32;
            if frames > cap {
                return Err(RecordingError::TooManyFrames {
                    line: 0,
                    round: round_index,
                    frames,
                    cap,
                });
            }
            if round.outcome == RoundOutcome::Timeout && frames != cap {
                return Err(RecordingError::ShortTimeoutRound {
                    line: 0,
                    round: round_index,
                    frames,
                    cap,
                });
            }
            let mut previous_health = [u32::MAX; 2];
            for (i, frame) in round.frames.iter().enumerate() {
                if frame.frame_index != i as u32 {
                    return Err(RecordingError::NonMonotonicFrame {
                        line: 0,
                        expected: i as u32,
                        found: frame.frame_index,
                    });
                }
                for (slot, pf) in frame.players.iter().enumerate() {
                    if !self.alphabets.contains(&pf.action) {
                        return Err(RecordingError::UnknownToken {
                            line: 0,
                            kind: "action",
                            token: pf.action.canonical_key(),
                        });
                    }
                    if pf.health > previous_health[slot] {
                        return Err(RecordingError::HealthIncrease {
                            line: 0,
                            player: self.players[slot].id.clone(),
                            from: previous_health[slot],
                            to: pf.health,
                        });
                    }
                    previous_health[slot] = pf.health;
                    if !pf.x.is_finite() {
                        return Err(RecordingError::InvalidHeader(format!(
                            "non-finite x position at round {round_index} frame {i}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

// Wire structs: the exact JSONL schema. Field order here defines the
// canonical serialization.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireHeader {
    schema_version: u32,
    match_id: String,
    fps: u32,
    round_limit_seconds: u32,
    alphabets: Alphabets,
    players: Vec<PlayerMeta>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePlayerFrame {
    st: String,
    sub: String,
    mv: String,
    hp: u32,
    x: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireFrame {
    round: u32,
    f: u32,
    p: Vec<WirePlayerFrame>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRoundEnd {
    round_end: u32,
    outcome: String,
}

fn malformed(line: usize, message: impl fmt::Display) -> RecordingError {
    RecordingError::MalformedLine {
        line,
        message: message.to_string(),
    }
}

/// Parses and validates a JSONL recording.
pub fn parse_recording(bytes: &[u8]) -> Result<MatchRecording, RecordingError> {
    let text = std::str::from_utf8(bytes)?;
    let mut lines = text.lines().enumerate();

    let (_, header_line) = lines.next().ok_or(RecordingError::MissingHeader)?;
    if header_line.trim().is_empty() {
        return Err(RecordingError::MissingHeader);
    }
    let header: WireHeader =
        serde_json::from_str(header_line).map_err(|e| malformed(1, e))?;
    if header.schema_version != RECORDING_SCHEMA_VERSION {
        return Err(RecordingError::SchemaVersion(header.schema_version));
    }
    if header.players.len() != 2 {
        return Err(RecordingError::PlayerCount {
            line: 1,
            found: header.players.len(),
        });
    }
    if header.fps == 0 {
        return Err(RecordingError::InvalidHeader("fps must be >= 1".into()));
    }
    if header.round_limit_seconds == 0 {
        return Err(RecordingError::InvalidHeader(
            "round_limit_seconds must be >= 1".into(),
        ));
    }
    header.alphabets.validate()?;
    let players: [PlayerMeta; 2] = [header.players[0].clone(), header.players[1].clone()];
    if players[0].id == players[1].id {
        return Err(RecordingError::InvalidHeader(format!(
            "duplicate player id {:?}",
            players[0].id
        )));
    }

    let cap = header.fps * header.round_limit_seconds;
    let mut rounds: Vec<Round> = Vec::new();
    let mut current: Vec<FrameSnapshot> = Vec::new();
    let mut previous_health = [u32::MAX; 2];

    let resolve = |line: usize,
                   kind: &'static str,
                   alphabet: &[String],
                   token: String|
     -> Result<String, RecordingError> {
        if alphabet.iter().any(|t| *t == token) {
            Ok(token)
        } else {
            Err(RecordingError::UnknownToken { line, kind, token })
        }
    };

    for (index, raw) in lines {
        let line = index + 1; // 1-based
        if raw.trim().is_empty() {
            return Err(malformed(line, "blank line"));
        }
        // Frame lines vastly outnumber round-end lines; try them first.
        if let Ok(frame) = serde_json::from_str::<WireFrame>(raw) {
            let round_index = rounds.len() as u32;
            if frame.round != round_index {
                return Err(RecordingError::RoundIndex {
                    line,
                    expected: round_index,
                    found: frame.round,
                });
            }
            if frame.f != current.len() as u32 {
                return Err(RecordingError::NonMonotonicFrame {
                    line,
                    expected: current.len() as u32,
                    found: frame.f,
                });
            }
            if frame.p.len() != 2 {
                return Err(RecordingError::PlayerCount {
                    line,
                    found: frame.p.len(),
                });
            }
            if current.len() as u32 >= cap {
                return Err(RecordingError::TooManyFrames {
                    line,
                    round: round_index,
                    frames: current.len() as u32 + 1,
                    cap,
                });
            }
            let mut slots = Vec::with_capacity(2);
            for (slot, wp) in frame.p.into_iter().enumerate() {
                if wp.hp > previous_health[slot] {
                    return Err(RecordingError::HealthIncrease {
                        line,
                        player: players[slot].id.clone(),
                        from: previous_health[slot],
                        to: wp.hp,
                    });
                }
                previous_health[slot] = wp.hp;
                if !wp.x.is_finite() {
                    return Err(malformed(line, "non-finite x position"));
                }
                slots.push(PlayerFrame {
                    action: ActionTriple {
                        state: resolve(line, "state", &header.alphabets.state, wp.st)?,
                        sub_state: resolve(line, "sub_state", &header.alphabets.sub_state, wp.sub)?,
                        basic_move: resolve(
                            line,
                            "basic_move",
                            &header.alphabets.basic_move,
                            wp.mv,
                        )?,
                    },
                    health: wp.hp,
                    x: wp.x,
                });
            }
            let players_pair: [PlayerFrame; 2] = match <[PlayerFrame; 2]>::try_from(slots) {
                Ok(pair) => pair,
                Err(_) => unreachable!("length checked above"),
            };
            current.push(FrameSnapshot {
                frame_index: frame.f,
                players: players_pair,
            });
        } else if let Ok(end) = serde_json::from_str::<WireRoundEnd>(raw) {
            let round_index = rounds.len() as u32;
            if end.round_end != round_index {
                return Err(RecordingError::RoundIndex {
                    line,
                    expected: round_index,
                    found: end.round_end,
                });
            }
            if current.is_empty() {
                return Err(RecordingError::EmptyRound {
                    line,
                    round: round_index,
                });
            }
            let outcome = RoundOutcome::from_wire(&end.outcome)
                .ok_or_else(|| malformed(line, format!("unknown outcome {:?}", end.outcome)))?;
            if outcome == RoundOutcome::Timeout && current.len() as u32 != cap {
                return Err(RecordingError::ShortTimeoutRound {
                    line,
                    round: round_index,
                    frames: current.len() as u32,
                    cap,
                });
            }
            rounds.push(Round {
                frames: std::mem::take(&mut current),
                outcome,
            });
            previous_health = [u32::MAX; 2];
        } else {
            // Re-parse as a frame to surface the more useful serde message.
            let Err(err) = serde_json::from_str::<WireFrame>(raw) else {
                unreachable!("frame parse succeeded on the retry");
            };
            return Err(malformed(line, err));
        }
    }

    if !current.is_empty() {
        return Err(RecordingError::UnterminatedRound {
            round: rounds.len() as u32,
        });
    }
    if rounds.is_empty() {
        return Err(RecordingError::NoRounds);
    }

    Ok(MatchRecording {
        schema_version: header.schema_version,
        match_id: header.match_id,
        fps: header.fps,
        round_limit_seconds: header.round_limit_seconds,
        alphabets: header.alphabets,
        players,
        rounds,
    })
}

/// Serializes a recording to canonical JSONL bytes.
///
/// Key order is fixed and floats use the shortest round-trip decimal, so
/// equal recordings serialize to identical bytes.
pub fn write_recording(rec: &MatchRecording) -> Result<Vec<u8>, RecordingError> {
    rec.validate()?;
    let mut out = Vec::new();
    let header = WireHeader {
        schema_version: rec.schema_version,
        match_id: rec.match_id.clone(),
        fps: rec.fps,
        round_limit_seconds: rec.round_limit_seconds,
        alphabets: rec.alphabets.clone(),
        players: rec.players.to_vec(),
    };
    push_line(&mut out, &header);
    for (round_index, round) in rec.rounds.iter().enumerate() {
        for frame in &round.frames {
            let wire = WireFrame {
                round: round_index as u32,
                f: frame.frame_index,
                p: frame
                    .players
                    .iter()
                    .map(|pf| WirePlayerFrame {
                        st: pf.action.state.clone(),
                        sub: pf.action.sub_state.clone(),
                        mv: pf.action.basic_move.clone(),
                        hp: pf.health,
                        x: pf.x,
                    })
                    .collect(),
            };
            push_line(&mut out, &wire);
        }
        push_line(
            &mut out,
            &WireRoundEnd {
                round_end: round_index as u32,
                outcome: round.outcome.as_wire().to_string(),
            },
        );
    }
    Ok(out)
}

fn push_line<T: Serialize>(out: &mut Vec<u8>, value: &T) {
    serde_json::to_writer(&mut *out, value).expect("wire structs serialize infallibly");
    out.push(b'\n');
}

/// Granularity of extracted action sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtractionMode {
    /// Collapse consecutive identical triples into single actions. The
    /// default: fingerprints describe what a player does, not for how long.
    #[default]
    Dedup,
    /// One action per frame, for sensitivity analysis.
    PerFrame,
}

impl ExtractionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtractionMode::Dedup => "dedup",
            ExtractionMode::PerFrame => "per-frame",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dedup" => Some(ExtractionMode::Dedup),
            "per-frame" => Some(ExtractionMode::PerFrame),
            _ => None,
        }
    }
}

impl fmt::Display for ExtractionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One player's ordered actions within one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSequence {
    pub player_id: String,
    pub match_id: String,
    pub round_index: u32,
    pub actions: Vec<ActionTriple>,
}

/// Extracts one action sequence per round for `player_id`.
///
/// Rounds are sequence boundaries: a knockout reset breaks behavioral
/// continuity, so later trigram windows never span them.
pub fn extract_action_sequences(
    rec: &MatchRecording,
    player_id: &str,
    mode: ExtractionMode,
) -> Result<Vec<ActionSequence>, RecordingError> {
    let slot = rec
        .player_slot(player_id)
        .ok_or_else(|| RecordingError::UnknownPlayer(player_id.to_string()))?;
    let mut sequences = Vec::with_capacity(rec.rounds.len());
    for (round_index, round) in rec.rounds.iter().enumerate() {
        let mut actions: Vec<ActionTriple> = Vec::new();
        for frame in &round.frames {
            let action = &frame.players[slot].action;
            match mode {
                ExtractionMode::PerFrame => actions.push(action.clone()),
                ExtractionMode::Dedup => {
                    if actions.last() != Some(action) {
                        actions.push(action.clone());
                    }
                }
            }
        }
        sequences.push(ActionSequence {
            player_id: player_id.to_string(),
            match_id: rec.match_id.clone(),
            round_index: round_index as u32,
            actions,
        });
    }
    Ok(sequences)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(s: &str, sub: &str, mv: &str) -> ActionTriple {
        ActionTriple::new(s, sub, mv)
    }

    fn tiny_alphabets() -> Alphabets {
        Alphabets {
            state: vec!["Stand".into(), "Jump".into()],
            sub_state: vec!["Resting".into(), "Blocking".into()],
            basic_move: vec!["Idle".into(), "MoveForward".into(), "JumpStraight".into()],
        }
    }

    fn header_line() -> String {
        concat!(
            r#"{"schema_version":1,"match_id":"m1","fps":60,"round_limit_seconds":100,"#,
            r#""alphabets":{"state":["Stand","Jump"],"sub_state":["Resting","Blocking"],"#,
            r#""basic_move":["Idle","MoveForward","JumpStraight"]},"#,
            r#""players":[{"id":"p1","controller":"human"},{"id":"p2","controller":"ai-normal"}]}"#
        )
        .to_string()
    }

    fn frame_line(round: u32, f: u32, hp: u32) -> String {
        format!(
            r#"{{"round":{round},"f":{f},"p":[{{"st":"Stand","sub":"Resting","mv":"Idle","hp":{hp},"x":2.0}},{{"st":"Stand","sub":"Resting","mv":"Idle","hp":100,"x":8.0}}]}}"#
        )
    }

    fn minimal_file() -> String {
        let mut s = header_line();
        s.push('\n');
        for f in 0..3 {
            s.push_str(&frame_line(0, f, 100));
            s.push('\n');
        }
        s.push_str(r#"{"round_end":0,"outcome":"ko:p1"}"#);
        s.push('\n');
        s
    }

    #[test]
    fn parses_minimal_valid_file() {
        let rec = parse_recording(minimal_file().as_bytes()).unwrap();
        assert_eq!(rec.rounds.len(), 1);
        assert_eq!(rec.rounds[0].frames.len(), 3);
        assert_eq!(rec.rounds[0].outcome, RoundOutcome::Knockout(0));
        assert_eq!(rec.players[0].id, "p1");
        assert_eq!(rec.match_id, "m1");
    }

    #[test]
    fn rejects_three_players_in_header() {
        let bad = header_line().replace(
            r#"{"id":"p2","controller":"ai-normal"}"#,
            r#"{"id":"p2","controller":"ai-normal"},{"id":"p3","controller":"human"}"#,
        );
        let err = parse_recording(bad.as_bytes()).unwrap_err();
        assert!(matches!(err, RecordingError::PlayerCount { line: 1, found: 3 }));
        assert!(err.to_string().contains("player count must be 2"));
    }

    #[test]
    fn rejects_unknown_token_with_line_number() {
        let mut s = header_line();
        s.push('\n');
        s.push_str(&frame_line(0, 0, 100));
        s.push('\n');
        s.push_str(&frame_line(0, 1, 100).replace(r#""mv":"Idle""#, r#""mv":"Teleport""#));
        s.push('\n');
        let err = parse_recording(s.as_bytes()).unwrap_err();
        match err {
            RecordingError::UnknownToken { line, kind, token } => {
                assert_eq!(line, 3);
                assert_eq!(kind, "basic_move");
                assert_eq!(token, "Teleport");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_non_monotonic_frame_index() {
        let mut s = header_line();
        s.push('\n');
        s.push_str(&frame_line(0, 0, 100));
        s.push('\n');
        s.push_str(&frame_line(0, 2, 100));
        s.push('\n');
        let err = parse_recording(s.as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            RecordingError::NonMonotonicFrame { line: 3, expected: 1, found: 2 }
        ));
    }

    #[test]
    fn rejects_health_increase() {
        let mut s = header_line();
        s.push('\n');
        s.push_str(&frame_line(0, 0, 90));
        s.push('\n');
        s.push_str(&frame_line(0, 1, 95));
        s.push('\n');
        let err = parse_recording(s.as_bytes()).unwrap_err();
        assert!(matches!(err, RecordingError::HealthIncrease { line: 3, .. }));
    }

    #[test]
    fn rejects_malformed_line_with_line_number() {
        let mut s = minimal_file();
        s.push_str("not json\n");
        let err = parse_recording(s.as_bytes()).unwrap_err();
        assert!(matches!(err, RecordingError::MalformedLine { line: 6, .. }));
    }

    #[test]
    fn rejects_unterminated_round() {
        let mut s = header_line();
        s.push('\n');
        s.push_str(&frame_line(0, 0, 100));
        s.push('\n');
        let err = parse_recording(s.as_bytes()).unwrap_err();
        assert!(matches!(err, RecordingError::UnterminatedRound { round: 0 }));
    }

    #[test]
    fn rejects_timeout_round_with_missing_frames() {
        let mut s = header_line();
        s.push('\n');
        s.push_str(&frame_line(0, 0, 100));
        s.push('\n');
        s.push_str(r#"{"round_end":0,"outcome":"timeout"}"#);
        s.push('\n');
        let err = parse_recording(s.as_bytes()).unwrap_err();
        assert!(matches!(err, RecordingError::ShortTimeoutRound { .. }));
    }

    #[test]
    fn write_parse_write_is_fixed_point() {
        let rec = parse_recording(minimal_file().as_bytes()).unwrap();
        let once = write_recording(&rec).unwrap();
        let twice = write_recording(&parse_recording(&once).unwrap()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn write_rejects_zero_rounds() {
        let mut rec = parse_recording(minimal_file().as_bytes()).unwrap();
        rec.rounds.clear();
        let err = write_recording(&rec).unwrap_err();
        assert!(err.to_string().contains("at least one round"));
    }

    #[test]
    fn dedup_collapses_runs() {
        let x = triple("Stand", "Resting", "Idle");
        let y = triple("Stand", "Resting", "MoveForward");
        let z = triple("Jump", "Resting", "JumpStraight");
        let rec = recording_with_moves(&["Idle", "Idle", "Idle", "MoveForward", "MoveForward", "JumpStraight"]);
        let seqs = extract_action_sequences(&rec, "p1", ExtractionMode::Dedup).unwrap();
        assert_eq!(seqs.len(), 1);
        assert_eq!(seqs[0].actions, vec![x, y, z]);
    }

    #[test]
    fn dedup_keeps_non_adjacent_repeats() {
        let rec = recording_with_moves(&["Idle", "MoveForward", "Idle"]);
        let seqs = extract_action_sequences(&rec, "p1", ExtractionMode::Dedup).unwrap();
        let moves: Vec<&str> = seqs[0].actions.iter().map(|a| a.basic_move.as_str()).collect();
        assert_eq!(moves, vec!["Idle", "MoveForward", "Idle"]);
    }

    #[test]
    fn per_frame_mode_is_identity() {
        let rec = recording_with_moves(&["Idle", "Idle", "MoveForward"]);
        let seqs = extract_action_sequences(&rec, "p1", ExtractionMode::PerFrame).unwrap();
        assert_eq!(seqs[0].actions.len(), 3);
    }

    #[test]
    fn extract_rejects_unknown_player() {
        let rec = recording_with_moves(&["Idle"]);
        let err = extract_action_sequences(&rec, "nobody", ExtractionMode::Dedup).unwrap_err();
        assert!(matches!(err, RecordingError::UnknownPlayer(_)));
    }

    /// Jump moves emit a Jump state so the alphabet check stays honest.
    fn recording_with_moves(moves: &[&str]) -> MatchRecording {
        let frames = moves
            .iter()
            .enumerate()
            .map(|(i, mv)| {
                let state = if *mv == "JumpStraight" { "Jump" } else { "Stand" };
                FrameSnapshot {
                    frame_index: i as u32,
                    players: [
                        PlayerFrame {
                            action: triple(state, "Resting", mv),
                            health: 100,
                            x: 2.0,
                        },
                        PlayerFrame {
                            action: triple("Stand", "Resting", "Idle"),
                            health: 100,
                            x: 8.0,
                        },
                    ],
                }
            })
            .collect();
        MatchRecording {
            schema_version: 1,
            match_id: "m1".into(),
            fps: 60,
            round_limit_seconds: 100,
            alphabets: tiny_alphabets(),
            players: [
                PlayerMeta { id: "p1".into(), controller: "human".into() },
                PlayerMeta { id: "p2".into(), controller: "ai-normal".into() },
            ],
            rounds: vec![Round {
                frames,
                outcome: RoundOutcome::Knockout(0),
            }],
        }
    }
}
