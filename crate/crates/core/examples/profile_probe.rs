//! Diagnostic: dumps the dominant trigrams of one preset's per-opponent
//! profiles to see where cross-opponent variance comes from.

use std::collections::BTreeMap;

use stylemark::fingerprint::{cosine_similarity, Fingerprint};
use stylemark::recording::ExtractionMode;
use stylemark::sim::{tournament_jobs, AgentPreset, CombatTuning, SimConfig};

fn main() {
    let target = std::env::args().nth(1).unwrap_or_else(|| "normal".into());
    let presets = AgentPreset::builtins();
    let config = SimConfig::default();
    let tuning = CombatTuning::default();
    let jobs = tournament_jobs(&presets, 10, &config).unwrap();

    let mut per_opponent: BTreeMap<String, Vec<Fingerprint>> = BTreeMap::new();
    for job in &jobs {
        if job.a.name != target && job.b.name != target {
            continue;
        }
        let (rec, _) = job.run(&config, &tuning).unwrap();
        let opp = rec.opponent_of(&target).unwrap().to_string();
        let seqs =
            stylemark::extract_action_sequences(&rec, &target, ExtractionMode::Dedup).unwrap();
        let fp = stylemark::build_fingerprint(&seqs, &target, &opp).unwrap();
        per_opponent.entry(opp).or_default().push(fp);
    }

    let pooled: BTreeMap<String, Fingerprint> = per_opponent
        .iter()
        .map(|(opp, fps)| (opp.clone(), stylemark::merge_fingerprints(fps).unwrap()))
        .collect();

    println!("pairwise cosines among {target}'s per-opponent profiles:");
    let opps: Vec<&String> = pooled.keys().collect();
    for i in 0..opps.len() {
        for j in (i + 1)..opps.len() {
            let s = cosine_similarity(&pooled[opps[i]], &pooled[opps[j]]).unwrap();
            println!("  vs-{:10} vs vs-{:10} {s:.3}", opps[i], opps[j]);
        }
    }

    for (opp, fp) in &pooled {
        let mut entries: Vec<(String, f64)> = fp
            .iter()
            .map(|(g, c)| (compact(&g.canonical_key()), c as f64 / fp.total_count() as f64))
            .collect();
        entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        println!("\n{target} vs {opp} (total {} windows, support {}):", fp.total_count(), fp.support_len());
        for (key, p) in entries.iter().take(12) {
            println!("  {p:.3}  {key}");
        }
    }
}

fn compact(key: &str) -> String {
    key.split('|')
        .map(|t| {
            let mut parts = t.split('/');
            let state = parts.next().unwrap_or("?");
            let sub = parts.next().unwrap_or("?");
            let mv = parts.next().unwrap_or("?");
            match (state, sub) {
                ("Stand", "Resting") => mv.to_string(),
                ("Stand", "Blocking") => "Block".to_string(),
                _ => format!("{sub}.{mv}"),
            }
        })
        .collect::<Vec<_>>()
        .join(" > ")
}
