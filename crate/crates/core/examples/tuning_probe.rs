//! Diagnostic: runs the standard 5-preset tournament in memory and prints
//! the separation / identification numbers the acceptance suite gates on.

use std::collections::BTreeMap;
use std::time::Instant;

use stylemark::fingerprint::{cosine_similarity, Fingerprint, Ngram};
use stylemark::profile::{build_generalized_profile, BehaviorProfile};
use stylemark::recording::{extract_action_sequences, ExtractionMode};
use stylemark::sim::{tournament_jobs, AgentPreset, CombatTuning, SimConfig};

fn main() {
    let matches_per_pair: u32 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(42);

    let presets = AgentPreset::builtins();
    let config = SimConfig { seed, ..SimConfig::default() };
    let tuning = CombatTuning::default();
    let jobs = tournament_jobs(&presets, matches_per_pair, &config).unwrap();

    let start = Instant::now();
    // per (player, opponent) profile counts + per-match fingerprints
    let mut per_opponent: BTreeMap<(String, String), Vec<Fingerprint>> = BTreeMap::new();
    let mut knockouts = 0u32;
    let mut rounds = 0u32;
    let mut dedup_actions = 0u64;
    let mut frames_total = 0u64;
    for job in &jobs {
        let (rec, stats) = job.run(&config, &tuning).unwrap();
        knockouts += stats.knockouts;
        rounds += stats.rounds;
        frames_total += stats.frames;
        for player in [&rec.players[0].id, &rec.players[1].id] {
            let opp = rec.opponent_of(player).unwrap().to_string();
            let seqs = extract_action_sequences(&rec, player, ExtractionMode::Dedup).unwrap();
            dedup_actions += seqs.iter().map(|s| s.actions.len() as u64).sum::<u64>();
            let fp = stylemark::build_fingerprint(&seqs, player, &opp).unwrap();
            per_opponent
                .entry((player.clone(), opp))
                .or_default()
                .push(fp);
        }
    }
    let sim_elapsed = start.elapsed();

    // Pool per-opponent profiles.
    let mut profiles: BTreeMap<String, Vec<BehaviorProfile>> = BTreeMap::new();
    for ((player, _opp), fps) in &per_opponent {
        let pooled = stylemark::merge_fingerprints(fps).unwrap();
        profiles.entry(player.clone()).or_default().push(BehaviorProfile {
            fingerprint: pooled,
            match_count: fps.len() as u32,
            mode: ExtractionMode::Dedup,
        });
    }

    println!(
        "sim: {} matches, {} rounds, {} knockouts ({:.0}%), {:.2} s, {:.1}M frames, {:.0} dedup actions/round",
        jobs.len(),
        rounds,
        knockouts,
        100.0 * knockouts as f64 / rounds as f64,
        sim_elapsed.as_secs_f64(),
        frames_total as f64 / 1e6,
        dedup_actions as f64 / rounds as f64 / 2.0
    );

    // Separation per preset.
    let names: Vec<String> = presets.iter().map(|p| p.name.clone()).collect();
    println!("\nper-preset separation (same vs cross, margin):");
    for name in &names {
        let own = &profiles[name];
        let mut same = Vec::new();
        for i in 0..own.len() {
            for j in (i + 1)..own.len() {
                same.push(cosine_similarity(&own[i].fingerprint, &own[j].fingerprint).unwrap());
            }
        }
        let mut cross = Vec::new();
        for other in &names {
            if other == name {
                continue;
            }
            for a in own {
                for b in &profiles[other] {
                    cross.push(cosine_similarity(&a.fingerprint, &b.fingerprint).unwrap());
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!(
            "  {name:10} same {:.3}  cross {:.3}  margin {:+.3}",
            mean(&same),
            mean(&cross),
            mean(&same) - mean(&cross)
        );
    }

    // Cross-preset similarity matrix over generalized profiles.
    println!("\ngeneralized cosine matrix:");
    let generalized: BTreeMap<String, BehaviorProfile> = profiles
        .iter()
        .map(|(name, ps)| (name.clone(), build_generalized_profile(ps).unwrap()))
        .collect();
    print!("{:>11}", "");
    for n in &names {
        print!(" {n:>9}");
    }
    println!();
    for a in &names {
        print!("{a:>11}");
        for b in &names {
            let s = cosine_similarity(
                &generalized[a].fingerprint,
                &generalized[b].fingerprint,
            )
            .unwrap();
            print!(" {s:>9.3}");
        }
        println!();
    }

    // Leave-one-match-out identification.
    let start = Instant::now();
    let mut total_counts: BTreeMap<String, BTreeMap<Ngram, u64>> = BTreeMap::new();
    for ((player, _), fps) in &per_opponent {
        let counts = total_counts.entry(player.clone()).or_default();
        for fp in fps {
            for (g, c) in fp.iter() {
                *counts.entry(g.clone()).or_insert(0) += c;
            }
        }
    }
    let mut correct = 0usize;
    let mut total = 0usize;
    let mut confusion: BTreeMap<(String, String), usize> = BTreeMap::new();
    for ((player, _opp), fps) in &per_opponent {
        for held_out in fps {
            if held_out.is_empty() {
                continue;
            }
            let mut best: Option<(String, f64)> = None;
            for name in &names {
                let mut counts = total_counts[name].clone();
                if name == player {
                    for (g, c) in held_out.iter() {
                        let e = counts.get_mut(g).unwrap();
                        *e -= c;
                    }
                    counts.retain(|_, c| *c > 0);
                }
                let gallery =
                    Fingerprint::from_counts(name.clone(), "generalized", 3, counts).unwrap();
                let s = cosine_similarity(held_out, &gallery).unwrap();
                let better = match &best {
                    None => true,
                    Some((bn, bs)) => s > *bs || (s == *bs && name < bn),
                };
                if better {
                    best = Some((name.clone(), s));
                }
            }
            let predicted = best.unwrap().0;
            *confusion.entry((player.clone(), predicted.clone())).or_default() += 1;
            if &predicted == player {
                correct += 1;
            }
            total += 1;
        }
    }
    println!(
        "\nleave-one-match-out: {}/{} = {:.1}%  ({:.2} s)",
        correct,
        total,
        100.0 * correct as f64 / total as f64,
        start.elapsed().as_secs_f64()
    );
    println!("confusions (true -> predicted, count):");
    for ((t, p), c) in &confusion {
        if t != p {
            println!("  {t} -> {p}: {c}");
        }
    }

    // Per-context accuracy for the worst pairs.
    let mut per_context: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
    for ((player, opp), fps) in &per_opponent {
        for held_out in fps {
            if held_out.is_empty() {
                continue;
            }
            let mut best: Option<(String, f64)> = None;
            for name in &names {
                let mut counts = total_counts[name].clone();
                if name == player {
                    for (g, c) in held_out.iter() {
                        let e = counts.get_mut(g).unwrap();
                        *e -= c;
                    }
                    counts.retain(|_, c| *c > 0);
                }
                let gallery =
                    Fingerprint::from_counts(name.clone(), "generalized", 3, counts).unwrap();
                let s = cosine_similarity(held_out, &gallery).unwrap();
                let better = match &best {
                    None => true,
                    Some((bn, bs)) => s > *bs || (s == *bs && name < bn),
                };
                if better {
                    best = Some((name.clone(), s));
                }
            }
            let entry = per_context.entry((player.clone(), opp.clone())).or_default();
            entry.1 += 1;
            if best.unwrap().0 == *player {
                entry.0 += 1;
            }
        }
    }
    println!("\nper-context accuracy:");
    for ((player, opp), (ok, n)) in &per_context {
        println!("  {player:>10} vs {opp:<10} {ok}/{n}");
    }
}
