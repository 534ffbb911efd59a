//! Play-style fingerprinting for fighting-game telemetry.
//!
//! The pipeline has four stages:
//!
//! 1. [`recording`] — a JSONL telemetry format holding per-frame snapshots of
//!    both fighters, plus run-length deduplication of those snapshots into
//!    action sequences.
//! 2. [`fingerprint`] — sparse probability distributions over trigrams of
//!    consecutive actions ("behavior fingerprints"), compared with cosine
//!    similarity.
//! 3. [`profile`] — per-opponent and generalized behavior profiles, similarity
//!    matrices, consistency statistics, nearest-neighbor identification and
//!    threshold clustering.
//! 4. [`sim`] — a deterministic 1-D arena simulator whose fuzzy-rule agents
//!    are driven by five interpretable parameters, used to generate telemetry
//!    corpora reproducibly.
//!
//! [`report`] renders analysis results as CSV tables and SVG heatmaps.

pub mod fingerprint;
pub mod profile;
pub mod recording;
pub mod report;
pub mod sim;

pub use fingerprint::{
    build_fingerprint, build_fingerprint_n, cosine_similarity, merge_fingerprints, Fingerprint,
    Ngram,
};
pub use profile::{
    build_generalized_profile, build_opponent_profiles, consistency_stats, cross_group_summary,
    identify_player, partition_by_threshold, similarity_matrix, BehaviorProfile,
    ConsistencyReport, CrossGroupRow, Group, IdentificationResult, SimilarityMatrix,
};
pub use recording::{
    extract_action_sequences, parse_recording, write_recording, ActionSequence, ActionTriple,
    Alphabets, ExtractionMode, FrameSnapshot, MatchRecording, PlayerFrame, PlayerMeta, Round,
    RoundOutcome,
};
pub use sim::{
    simulate_match, simulate_match_with_stats, tournament_jobs, AgentPreset, CombatTuning,
    MatchJob, SimConfig,
};
