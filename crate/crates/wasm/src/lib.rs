//! Browser bindings for the play-style toolkit.
//!
//! Three operations back the demo page: an in-memory preset tournament with
//! a similarity heatmap, a head-to-head comparison of two custom agents,
//! and a downsampled single-round timeline for canvas playback.
//!
//! Every export takes and returns plain strings and numbers. Errors come
//! back as `{"error": "..."}` JSON rather than thrown values, so the same
//! functions are callable (and tested) on native targets.

use std::collections::BTreeMap;

use wasm_bindgen::prelude::*;

use stylemark::fingerprint::{cosine_similarity, Fingerprint};
use stylemark::profile::{consistency_stats, similarity_matrix, BehaviorProfile};
use stylemark::recording::ExtractionMode;
use stylemark::report;
use stylemark::sim::{
    simulate_match_with_stats, tournament_jobs, AgentPreset, CombatTuning, SimConfig,
};
use stylemark::{build_fingerprint, extract_action_sequences, merge_fingerprints};

fn error_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

fn demo_config(rounds: u32, round_limit_seconds: u32, seed: u32) -> SimConfig {
    SimConfig {
        rounds_per_match: rounds,
        round_limit_seconds,
        seed: u64::from(seed),
        ..SimConfig::default()
    }
}

/// Runs the five-preset round-robin in memory and returns labels, the
/// pairwise similarity matrix of generalized profiles, a rendered SVG
/// heatmap, per-preset consistency rows and separation margins.
#[wasm_bindgen]
pub fn run_tournament(
    matches_per_pair: u32,
    rounds_per_match: u32,
    round_limit_seconds: u32,
    seed: u32,
) -> String {
    if matches_per_pair == 0 || rounds_per_match == 0 || round_limit_seconds == 0 {
        return error_json("matches, rounds and round limit must all be at least 1");
    }
    if matches_per_pair > 10 || round_limit_seconds > 100 {
        return error_json("demo caps: at most 10 matches per pair and 100 s rounds");
    }
    let presets = AgentPreset::builtins();
    let config = demo_config(rounds_per_match, round_limit_seconds, seed);
    let tuning = CombatTuning::default();
    let jobs = match tournament_jobs(&presets, matches_per_pair, &config) {
        Ok(jobs) => jobs,
        Err(e) => return error_json(e),
    };

    let mut per_opponent: BTreeMap<String, BTreeMap<String, Vec<Fingerprint>>> = BTreeMap::new();
    let mut knockouts = 0u32;
    let mut rounds = 0u32;
    for job in &jobs {
        let (rec, stats) = match job.run(&config, &tuning) {
            Ok(r) => r,
            Err(e) => return error_json(e),
        };
        knockouts += stats.knockouts;
        rounds += stats.rounds;
        for player in [rec.players[0].id.clone(), rec.players[1].id.clone()] {
            let opponent = rec.opponent_of(&player).unwrap().to_string();
            let seqs = match extract_action_sequences(&rec, &player, ExtractionMode::Dedup) {
                Ok(s) => s,
                Err(e) => return error_json(e),
            };
            let fp = match build_fingerprint(&seqs, &player, &opponent) {
                Ok(f) => f,
                Err(e) => return error_json(e),
            };
            per_opponent.entry(player).or_default().entry(opponent).or_default().push(fp);
        }
    }

    let mut generalized = Vec::new();
    let mut consistency = Vec::new();
    let mut margins = Vec::new();
    let names: Vec<String> = presets.iter().map(|p| p.name.clone()).collect();
    let pooled: BTreeMap<String, Vec<Fingerprint>> = per_opponent
        .iter()
        .map(|(player, by_opp)| {
            let profiles: Vec<Fingerprint> = by_opp
                .values()
                .map(|fps| merge_fingerprints(fps).unwrap())
                .collect();
            (player.clone(), profiles)
        })
        .collect();
    for name in &names {
        let profiles: Vec<BehaviorProfile> = pooled[name]
            .iter()
            .map(|fp| BehaviorProfile {
                fingerprint: fp.clone(),
                match_count: matches_per_pair,
                mode: ExtractionMode::Dedup,
            })
            .collect();
        match consistency_stats(&profiles) {
            Ok(report) => consistency.push(report),
            Err(e) => return error_json(e),
        }
        let all: Vec<Fingerprint> = pooled[name].clone();
        let merged = match merge_fingerprints(&all) {
            Ok(m) => m,
            Err(e) => return error_json(e),
        };
        generalized.push(BehaviorProfile {
            fingerprint: merged,
            match_count: matches_per_pair * 4,
            mode: ExtractionMode::Dedup,
        });
    }
    for name in &names {
        let own = &pooled[name];
        let mut same = Vec::new();
        for i in 0..own.len() {
            for j in (i + 1)..own.len() {
                same.push(cosine_similarity(&own[i], &own[j]).unwrap());
            }
        }
        let mut cross = Vec::new();
        for other in &names {
            if other == name {
                continue;
            }
            for a in own {
                for b in &pooled[other] {
                    cross.push(cosine_similarity(a, b).unwrap());
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        margins.push(serde_json::json!({
            "preset": name,
            "same": mean(&same),
            "cross": mean(&cross),
            "margin": mean(&same) - mean(&cross),
        }));
    }

    let matrix = match similarity_matrix(&generalized) {
        Ok(m) => m,
        Err(e) => return error_json(e),
    };
    let values: Vec<Vec<f64>> = (0..matrix.len())
        .map(|i| (0..matrix.len()).map(|j| matrix.get(i, j)).collect())
        .collect();
    serde_json::json!({
        "labels": matrix.labels(),
        "values": values,
        "svg": report::heatmap_svg(&matrix),
        "consistency": consistency,
        "margins": margins,
        "rounds": rounds,
        "knockouts": knockouts,
        "matches": jobs.len(),
    })
    .to_string()
}

fn preset_from_json(name: &str, json: &str) -> Result<AgentPreset, String> {
    let mut preset: AgentPreset =
        serde_json::from_str(json).map_err(|e| format!("{name}: {e}"))?;
    if preset.name.is_empty() {
        preset.name = name.to_string();
    }
    preset.validate().map_err(|e| format!("{name}: {e}"))?;
    Ok(preset)
}

/// Simulates matches between two custom agents and returns their style
/// similarity plus the dominant trigrams of each fingerprint.
#[wasm_bindgen]
pub fn compare_presets(
    preset_a_json: String,
    preset_b_json: String,
    matches: u32,
    round_limit_seconds: u32,
    seed: u32,
) -> String {
    if matches == 0 || matches > 10 || round_limit_seconds == 0 || round_limit_seconds > 100 {
        return error_json("demo caps: 1..=10 matches, 1..=100 s rounds");
    }
    let mut a = match preset_from_json("agent-a", &preset_a_json) {
        Ok(p) => p,
        Err(e) => return error_json(e),
    };
    let mut b = match preset_from_json("agent-b", &preset_b_json) {
        Ok(p) => p,
        Err(e) => return error_json(e),
    };
    // Distinct ids keep the two sides separable even with equal settings.
    a.name = format!("{}-a", a.name);
    b.name = format!("{}-b", b.name);

    let tuning = CombatTuning::default();
    let mut fps_a = Vec::new();
    let mut fps_b = Vec::new();
    let mut knockouts = 0u32;
    for match_index in 0..matches {
        let mut config = demo_config(1, round_limit_seconds, seed);
        config.seed = stylemark::sim::rng::match_seed(config.seed, &a.name, &b.name, match_index);
        let (rec, stats) = match simulate_match_with_stats(&a, &b, &config, &tuning) {
            Ok(r) => r,
            Err(e) => return error_json(e),
        };
        knockouts += stats.knockouts;
        for (preset, out) in [(&a, &mut fps_a), (&b, &mut fps_b)] {
            let seqs =
                match extract_action_sequences(&rec, &preset.name, ExtractionMode::Dedup) {
                    Ok(s) => s,
                    Err(e) => return error_json(e),
                };
            match build_fingerprint(&seqs, &preset.name, "duel") {
                Ok(fp) => out.push(fp),
                Err(e) => return error_json(e),
            }
        }
    }
    let fp_a = match merge_fingerprints(&fps_a) {
        Ok(f) => f,
        Err(e) => return error_json(e),
    };
    let fp_b = match merge_fingerprints(&fps_b) {
        Ok(f) => f,
        Err(e) => return error_json(e),
    };
    let similarity = match cosine_similarity(&fp_a, &fp_b) {
        Ok(s) => s,
        Err(e) => return error_json(e),
    };

    // Dominant trigrams across both fingerprints, by max probability.
    let mut keys: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for (g, _) in fp_a.iter() {
        keys.entry(g.canonical_key()).or_default().0 = fp_a.prob(g);
    }
    for (g, _) in fp_b.iter() {
        keys.entry(g.canonical_key()).or_default().1 = fp_b.prob(g);
    }
    let mut top: Vec<(String, f64, f64)> =
        keys.into_iter().map(|(k, (pa, pb))| (k, pa, pb)).collect();
    top.sort_by(|x, y| (y.1.max(y.2)).partial_cmp(&(x.1.max(x.2))).unwrap());
    top.truncate(12);
    let top_json: Vec<serde_json::Value> = top
        .iter()
        .map(|(key, pa, pb)| serde_json::json!({ "key": key, "a": pa, "b": pb }))
        .collect();

    serde_json::json!({
        "similarity": similarity,
        "windows_a": fp_a.total_count(),
        "windows_b": fp_b.total_count(),
        "knockouts": knockouts,
        "top": top_json,
    })
    .to_string()
}

/// Simulates one round between two custom agents and returns a downsampled
/// timeline (positions, health, current moves) for canvas playback.
#[wasm_bindgen]
pub fn match_timeline(
    preset_a_json: String,
    preset_b_json: String,
    round_limit_seconds: u32,
    seed: u32,
    stride: u32,
) -> String {
    if round_limit_seconds == 0 || round_limit_seconds > 100 {
        return error_json("demo caps: 1..=100 s rounds");
    }
    let stride = stride.max(1) as usize;
    let a = match preset_from_json("agent-a", &preset_a_json) {
        Ok(p) => p,
        Err(e) => return error_json(e),
    };
    let mut b = match preset_from_json("agent-b", &preset_b_json) {
        Ok(p) => p,
        Err(e) => return error_json(e),
    };
    if b.name == a.name {
        b.name = format!("{}-2", b.name);
    }
    let config = demo_config(1, round_limit_seconds, seed);
    let tuning = CombatTuning::default();
    let rec = match stylemark::simulate_match(&a, &b, &config, &tuning) {
        Ok(r) => r,
        Err(e) => return error_json(e),
    };
    let round = &rec.rounds[0];
    let frames: Vec<serde_json::Value> = round
        .frames
        .iter()
        .step_by(stride)
        .map(|f| {
            serde_json::json!([
                f.players[0].x,
                f.players[0].health,
                f.players[0].action.basic_move,
                f.players[1].x,
                f.players[1].health,
                f.players[1].action.basic_move,
            ])
        })
        .collect();
    serde_json::json!({
        "fps": rec.fps,
        "stride": stride,
        "arena_width": config.arena_width,
        "initial_health": config.initial_health,
        "outcome": match round.outcome {
            stylemark::recording::RoundOutcome::Knockout(0) => "ko:p1",
            stylemark::recording::RoundOutcome::Knockout(_) => "ko:p2",
            stylemark::recording::RoundOutcome::Timeout => "timeout",
        },
        "frames": frames,
    })
    .to_string()
}
