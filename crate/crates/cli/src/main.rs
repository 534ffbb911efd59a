//! `stylemark` — batch pipeline for play-style fingerprinting.
//!
//! Exit codes: 0 success, 1 environment/I-O failure, 2 usage or validation
//! error (clap's own parse errors also exit 2). All file outputs are written
//! to a temp path and renamed into place, so failures never leave partial
//! files behind.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stylemark::profile::{
    build_generalized_profile, consistency_stats, cross_group_summary, identify_player,
    similarity_matrix, BehaviorProfile, OpponentProfileBuilder, SimilarityMatrix,
};
use stylemark::recording::ExtractionMode;
use stylemark::report;
use stylemark::sim::{
    self, tournament_jobs, AgentPreset, CombatTuning, MatchJob, MatchStats, SimConfig,
    TournamentManifest,
};

mod inputs;

use inputs::{read_profiles, read_recording_paths, CliError, Ctx};

#[derive(Parser)]
#[command(
    name = "stylemark",
    version,
    about = "Play-style fingerprints from fighting-game telemetry: simulate, fingerprint, compare, report"
)]
struct Cli {
    /// Base seed for simulation commands.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads for simulation. Outputs are independent of this value.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Action-sequence granularity for fingerprinting.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Dedup)]
    mode: ModeArg,

    /// Output format where a command supports more than one.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Combat tuning file (defaults to $STYLEMARK_CONFIG, else built-ins).
    #[arg(long, global = true)]
    tuning: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Dedup,
    #[value(name = "per-frame")]
    PerFrame,
}

impl From<ModeArg> for ExtractionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Dedup => ExtractionMode::Dedup,
            ModeArg::PerFrame => ExtractionMode::PerFrame,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate matches for every unordered pair of the given presets.
    Simulate(SimulateArgs),
    /// Run the full five-preset protocol (alias for `simulate --presets all
    /// --matches 10`).
    Tournament(TournamentArgs),
    /// Build per-opponent and generalized behavior profiles from recordings.
    Fingerprint(FingerprintArgs),
    /// Print the cosine similarity of two profiles to 6 decimals.
    Compare(CompareArgs),
    /// Compute the pairwise similarity matrix of a set of profiles.
    Matrix(MatrixArgs),
    /// Write the full analysis report: matrix, consistency table, and
    /// optionally the human/AI cross-group table and an SVG heatmap.
    Report(ReportArgs),
    /// Rank gallery profiles by similarity to a query profile.
    Identify(IdentifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// `all`, a comma-separated list of built-in preset names, or a path to
    /// a JSON file holding an array of custom presets.
    #[arg(long, default_value = "all")]
    presets: String,

    /// Matches per pair.
    #[arg(long, default_value_t = 10)]
    matches: u32,

    /// Output directory for recordings and manifest.json.
    #[arg(long)]
    out: PathBuf,

    /// Rounds per match.
    #[arg(long, default_value_t = 2)]
    rounds: u32,

    #[arg(long, default_value_t = 60)]
    fps: u32,

    /// Round limit in seconds.
    #[arg(long, default_value_t = 100)]
    round_limit: u32,
}

#[derive(Args)]
struct TournamentArgs {
    /// Output directory for recordings and manifest.json.
    #[arg(long)]
    out: PathBuf,

    /// Matches per pair.
    #[arg(long, default_value_t = 10)]
    matches: u32,
}

#[derive(Args)]
struct FingerprintArgs {
    /// Recording files or directories containing `.jsonl` recordings.
    #[arg(required = true)]
    recordings: Vec<PathBuf>,

    /// Only fingerprint this player (default: every player found).
    #[arg(long)]
    player: Option<String>,

    /// Output directory for profile JSON files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    profile_a: PathBuf,
    profile_b: PathBuf,
}

#[derive(Args)]
struct MatrixArgs {
    /// Profile files or directories containing `.profile.json` files.
    #[arg(required = true)]
    profiles: Vec<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding profile JSON files.
    #[arg(long)]
    profiles: PathBuf,

    /// JSON file mapping profile labels to "human" or "ai"; enables the
    /// cross-group table.
    #[arg(long)]
    groups: Option<PathBuf>,

    /// Output directory for the report CSVs (and SVG with --format svg).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IdentifyArgs {
    /// Query profile file.
    #[arg(long)]
    query: PathBuf,

    /// Gallery profile files or directories.
    #[arg(long, required = true, num_args = 1..)]
    gallery: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx;
    let result = match run(cli) {
        Ok(()) => return ExitCode::SUCCESS,
        Err(e) => e,
    };
    let _ = ctx; // keep Ctx for future global state without churn
    eprintln!("error: {result}");
    ExitCode::from(result.exit_code())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tuning = load_tuning(cli.tuning.as_deref())?;
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(&cli, args, &tuning),
        Command::Tournament(args) => {
            let sim_args = SimulateArgs {
                presets: "all".into(),
                matches: args.matches,
                out: args.out.clone(),
                rounds: 2,
                fps: 60,
                round_limit: 100,
            };
            cmd_simulate(&cli, &sim_args, &tuning)
        }
        Command::Fingerprint(args) => cmd_fingerprint(&cli, args),
        Command::Compare(args) => cmd_compare(args),
        Command::Matrix(args) => cmd_matrix(&cli, args),
        Command::Report(args) => cmd_report(&cli, args),
        Command::Identify(args) => cmd_identify(&cli, args),
    }
}

fn load_tuning(flag: Option<&Path>) -> Result<CombatTuning, CliError> {
    let path = match flag {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os("STYLEMARK_CONFIG").map(PathBuf::from),
    };
    match path {
        None => Ok(CombatTuning::default()),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::io(format!("reading tuning file {}", path.display()), e))?;
            CombatTuning::from_json(&text)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        }
    }
}

fn resolve_presets(spec: &str) -> Result<Vec<AgentPreset>, CliError> {
    if spec == "all" {
        return Ok(AgentPreset::builtins());
    }
    let as_path = Path::new(spec);
    if spec.ends_with(".json") || as_path.exists() {
        let text = std::fs::read_to_string(as_path)
            .map_err(|e| CliError::io(format!("reading preset file {spec}"), e))?;
        let presets: Vec<AgentPreset> = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{spec}: {e}")))?;
        for p in &presets {
            p.validate()
                .map_err(|e| CliError::usage(format!("{spec}: preset {:?}: {e}", p.name)))?;
        }
        return Ok(presets);
    }
    spec.split(',')
        .map(|name| {
            AgentPreset::builtin(name.trim())
                .ok_or_else(|| CliError::usage(format!("unknown preset {:?}", name.trim())))
        })
        .collect()
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs, tuning: &CombatTuning) -> Result<(), CliError> {
    let presets = resolve_presets(&args.presets)?;
    let config = SimConfig {
        fps: args.fps,
        round_limit_seconds: args.round_limit,
        rounds_per_match: args.rounds,
        seed: cli.seed,
        ..SimConfig::default()
    };
    let jobs = tournament_jobs(&presets, args.matches, &config)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::io(format!("creating {}", args.out.display()), e))?;

    let stats = run_jobs(&jobs, &config, tuning, &args.out, cli.jobs)?;
    let manifest = TournamentManifest::from_jobs(&jobs, &config, args.matches);
    sim::write_atomic(&args.out.join("manifest.json"), manifest.to_json().as_bytes())?;

    let pairs = jobs.iter().map(|j| j.pair_index).max().map_or(0, |m| m + 1);
    println!("pairs: {pairs}");
    println!("matches: {}", jobs.len());
    println!("rounds: {}", stats.rounds);
    println!("knockouts: {}", stats.knockouts);
    println!("out: {}", args.out.display());
    Ok(())
}

/// Runs match jobs across `workers` threads. Each job writes only its own
/// file and every byte it produces is derived from its own seed, so the
/// output set is identical for any worker count or scheduling order.
fn run_jobs(
    jobs: &[MatchJob],
    config: &SimConfig,
    tuning: &CombatTuning,
    out_dir: &Path,
    workers: usize,
) -> Result<MatchStats, CliError> {
    let workers = workers.max(1).min(jobs.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<Result<MatchStats, CliError>> = std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for _ in 0..workers {
            let next = &next;
            handles.push(scope.spawn(move || -> Result<MatchStats, CliError> {
                let mut local = MatchStats::default();
                loop {
                    let index = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    let Some(job) = jobs.get(index) else {
                        return Ok(local);
                    };
                    let (recording, stats) = job.run(config, tuning)?;
                    let bytes = stylemark::write_recording(&recording)?;
                    sim::write_atomic(&out_dir.join(&job.file_name), &bytes)?;
                    local.rounds += stats.rounds;
                    local.knockouts += stats.knockouts;
                    local.frames += stats.frames;
                }
            }));
        }
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut totals = MatchStats::default();
    for result in results {
        let stats = result?;
        totals.rounds += stats.rounds;
        totals.knockouts += stats.knockouts;
        totals.frames += stats.frames;
    }
    Ok(totals)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect()
}

fn cmd_fingerprint(cli: &Cli, args: &FingerprintArgs) -> Result<(), CliError> {
    let mode: ExtractionMode = cli.mode.into();
    let paths = read_recording_paths(&args.recordings)?;
    if paths.is_empty() {
        return Err(CliError::usage("no recording files found".into()));
    }

    // First pass: discover players (header-only would do, but recordings
    // also need full validation before any output is produced).
    let mut players: Vec<String> = Vec::new();
    for path in &paths {
        let rec = inputs::read_recording(path)?;
        for p in &rec.players {
            if !players.contains(&p.id) {
                players.push(p.id.clone());
            }
        }
    }
    players.sort();
    if let Some(player) = &args.player {
        if !players.contains(player) {
            return Err(CliError::usage(format!(
                "player {player:?} not found in the given recordings"
            )));
        }
        players.retain(|p| p == player);
    }

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::io(format!("creating {}", args.out.display()), e))?;

    let mut written = 0usize;
    for player in &players {
        let mut builder = OpponentProfileBuilder::new(player.clone(), mode);
        for path in &paths {
            let rec = inputs::read_recording(path)?;
            builder.add_recording(&rec)?;
        }
        let profiles = builder.finish()?;
        for profile in &profiles {
            if profile.fingerprint.is_empty() {
                eprintln!(
                    "warning: empty fingerprint for {} vs {} (all sequences shorter than 3)",
                    profile.player_id(),
                    profile.context()
                );
            }
            let file = args.out.join(format!(
                "{}__vs__{}.profile.json",
                sanitize(player),
                sanitize(profile.context())
            ));
            sim::write_atomic(&file, profile.to_json().as_bytes())?;
            written += 1;
        }
        let generalized = build_generalized_profile(&profiles)?;
        let file = args
            .out
            .join(format!("{}__generalized.profile.json", sanitize(player)));
        sim::write_atomic(&file, generalized.to_json().as_bytes())?;
        written += 1;
    }
    println!("profiles: {written}");
    println!("out: {}", args.out.display());
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let a = inputs::read_profile(&args.profile_a)?;
    let b = inputs::read_profile(&args.profile_b)?;
    let similarity = stylemark::cosine_similarity(&a.fingerprint, &b.fingerprint)?;
    println!("{similarity:.6}");
    Ok(())
}

fn cmd_matrix(cli: &Cli, args: &MatrixArgs) -> Result<(), CliError> {
    let profiles = read_profiles(&args.profiles)?;
    if profiles.len() < 2 {
        return Err(CliError::usage(format!(
            "matrix needs at least 2 profiles (got {})",
            profiles.len()
        )));
    }
    let matrix = similarity_matrix(&profiles)?;
    let rendered = render_matrix(&matrix, cli.format);
    match &args.out {
        Some(path) => sim::write_atomic(path, rendered.as_bytes())?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn render_matrix(matrix: &SimilarityMatrix, format: FormatArg) -> String {
    match format {
        FormatArg::Csv => report::matrix_csv(matrix),
        FormatArg::Svg => report::heatmap_svg(matrix),
        FormatArg::Json => report::matrix_json(matrix),
    }
}

fn cmd_report(cli: &Cli, args: &ReportArgs) -> Result<(), CliError> {
    let all = read_profiles(std::slice::from_ref(&args.profiles))?;
    if all.len() < 2 {
        return Err(CliError::usage(format!(
            "report needs at least 2 profiles (got {})",
            all.len()
        )));
    }
    let groups = args.groups.as_deref().map(inputs::read_groups).transpose()?;

    // Per-opponent profiles feed the consistency table; generalized profiles
    // feed the matrix and cross-group table. Players lacking stored
    // generalized profiles get them pooled on the fly.
    let mut per_player: BTreeMap<String, Vec<&BehaviorProfile>> = BTreeMap::new();
    let mut generalized: BTreeMap<String, BehaviorProfile> = BTreeMap::new();
    for profile in &all {
        if profile.is_generalized() {
            generalized.insert(profile.player_id().to_string(), profile.clone());
        } else {
            per_player
                .entry(profile.player_id().to_string())
                .or_default()
                .push(profile);
        }
    }
    for (player, list) in &per_player {
        if !generalized.contains_key(player) {
            let owned: Vec<BehaviorProfile> = list.iter().map(|p| (*p).clone()).collect();
            generalized.insert(player.clone(), build_generalized_profile(&owned)?);
        }
    }

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::io(format!("creating {}", args.out.display()), e))?;

    let mut consistency = Vec::new();
    for list in per_player.values() {
        if list.len() >= 2 {
            let owned: Vec<BehaviorProfile> = list.iter().map(|p| (*p).clone()).collect();
            consistency.push(consistency_stats(&owned)?);
        }
    }
    sim::write_atomic(
        &args.out.join("consistency.csv"),
        report::consistency_csv(&consistency).as_bytes(),
    )?;

    let gallery: Vec<BehaviorProfile> = generalized.values().cloned().collect();
    let matrix = similarity_matrix(&gallery)?;
    sim::write_atomic(
        &args.out.join("similarity_matrix.csv"),
        report::matrix_csv(&matrix).as_bytes(),
    )?;
    if cli.format == FormatArg::Svg {
        sim::write_atomic(
            &args.out.join("similarity_matrix.svg"),
            report::heatmap_svg(&matrix).as_bytes(),
        )?;
    }

    if let Some(groups) = groups {
        let rows = cross_group_summary(&matrix, &groups)?;
        sim::write_atomic(
            &args.out.join("cross_group.csv"),
            report::cross_group_csv(&rows).as_bytes(),
        )?;
    }
    println!("out: {}", args.out.display());
    Ok(())
}

fn cmd_identify(cli: &Cli, args: &IdentifyArgs) -> Result<(), CliError> {
    let query = inputs::read_profile(&args.query)?;
    let gallery = read_profiles(&args.gallery)?;
    let result = identify_player(&query.fingerprint, &gallery)?;
    match cli.format {
        FormatArg::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&result).expect("result serializes infallibly")
            );
        }
        _ => {
            println!("rank,label,similarity");
            for (rank, (label, similarity)) in result.ranking.iter().enumerate() {
                println!("{},{},{similarity:.6}", rank + 1, label);
            }
        }
    }
    Ok(())
}
