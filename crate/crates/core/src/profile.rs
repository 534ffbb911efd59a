//! Behavior profiles and the analysis built on top of them: similarity
//! matrices, per-player consistency statistics, human/AI cross-group
//! summaries, nearest-neighbor identification and threshold clustering.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingerprint::{
    cosine_similarity, merge_fingerprints, Fingerprint, FingerprintError, FingerprintFile, Ngram,
    GENERALIZED_CONTEXT,
};
use crate::recording::{extract_action_sequences, ExtractionMode, MatchRecording, RecordingError};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
    #[error(transparent)]
    Recording(#[from] RecordingError),
    #[error("player {0:?} does not appear in any recording")]
    PlayerNotFound(String),
    #[error("profiles mix players {0:?} and {1:?}")]
    MixedPlayers(String, String),
    #[error("no profiles given")]
    NoProfiles,
    #[error("consistency statistics need at least 2 profiles (got {0})")]
    TooFewProfiles(usize),
    #[error("duplicate profile label {0:?}")]
    DuplicateLabel(String),
    #[error("label {0:?} has no group assignment")]
    UngroupedLabel(String),
    #[error("cross-group summary needs at least one {0} label besides the row itself")]
    EmptyGroup(&'static str),
    #[error("similarity matrix is not {0}")]
    BadMatrix(&'static str),
    #[error("gallery is empty")]
    EmptyGallery,
}

/// A fingerprint tagged with how much gameplay backs it.
///
/// Per-opponent profiles pool all matches of one player against exactly one
/// opponent; generalized profiles pool across opponents.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorProfile {
    pub fingerprint: Fingerprint,
    pub match_count: u32,
    pub mode: ExtractionMode,
}

impl BehaviorProfile {
    pub fn player_id(&self) -> &str {
        self.fingerprint.player_id()
    }

    pub fn context(&self) -> &str {
        self.fingerprint.context()
    }

    pub fn is_generalized(&self) -> bool {
        self.context() == GENERALIZED_CONTEXT
    }

    /// Stable label used in matrices, reports and file names: the player id
    /// for generalized profiles, `player:opponent` for per-opponent ones.
    pub fn label(&self) -> String {
        if self.is_generalized() {
            self.player_id().to_string()
        } else {
            format!("{}:{}", self.player_id(), self.context())
        }
    }

    pub fn to_json(&self) -> String {
        let file = FingerprintFile::from_fingerprint(
            &self.fingerprint,
            Some(self.match_count),
            Some(self.mode.as_str().to_string()),
        );
        serde_json::to_string_pretty(&file).expect("profile serializes infallibly")
    }

    /// Parses a profile file; plain fingerprint files load with
    /// `match_count = 0` and the default mode.
    pub fn from_json(text: &str) -> Result<Self, FingerprintError> {
        let file: FingerprintFile = serde_json::from_str(text)?;
        let (fingerprint, match_count, mode) = file.into_fingerprint()?;
        let mode = match mode {
            Some(s) => ExtractionMode::parse(&s)
                .ok_or_else(|| FingerprintError::File(format!("unknown mode {s:?}")))?,
            None => ExtractionMode::default(),
        };
        Ok(Self {
            fingerprint,
            match_count: match_count.unwrap_or(0),
            mode,
        })
    }
}

/// Incrementally folds recordings into per-opponent profiles for one player,
/// so a tournament can be processed one file at a time.
#[derive(Debug)]
pub struct OpponentProfileBuilder {
    player_id: String,
    mode: ExtractionMode,
    n: usize,
    recordings_seen: usize,
    per_opponent: BTreeMap<String, (BTreeMap<Ngram, u64>, u32)>,
}

impl OpponentProfileBuilder {
    pub fn new(player_id: impl Into<String>, mode: ExtractionMode) -> Self {
        Self {
            player_id: player_id.into(),
            mode,
            n: crate::fingerprint::DEFAULT_NGRAM_LEN,
            recordings_seen: 0,
            per_opponent: BTreeMap::new(),
        }
    }

    /// Folds one recording in. Returns false (and changes nothing) if the
    /// player does not participate in it.
    pub fn add_recording(&mut self, rec: &MatchRecording) -> Result<bool, ProfileError> {
        self.recordings_seen += 1;
        let Some(opponent) = rec.opponent_of(&self.player_id) else {
            return Ok(false);
        };
        let opponent = opponent.to_string();
        let sequences = extract_action_sequences(rec, &self.player_id, self.mode)?;
        let fp = crate::fingerprint::build_fingerprint_n(
            &sequences,
            &self.player_id,
            &opponent,
            self.n,
        )?;
        let (counts, matches) = self.per_opponent.entry(opponent).or_default();
        for (ngram, count) in fp.iter() {
            *counts.entry(ngram.clone()).or_insert(0) += count;
        }
        *matches += 1;
        Ok(true)
    }

    /// One profile per distinct opponent, ordered by opponent id.
    pub fn finish(self) -> Result<Vec<BehaviorProfile>, ProfileError> {
        if self.recordings_seen > 0 && self.per_opponent.is_empty() {
            return Err(ProfileError::PlayerNotFound(self.player_id));
        }
        let mut profiles = Vec::with_capacity(self.per_opponent.len());
        for (opponent, (counts, match_count)) in self.per_opponent {
            let fingerprint =
                Fingerprint::from_counts(self.player_id.clone(), opponent, self.n, counts)?;
            profiles.push(BehaviorProfile {
                fingerprint,
                match_count,
                mode: self.mode,
            });
        }
        Ok(profiles)
    }
}

/// Builds one profile per distinct opponent of `player_id`, each pooling all
/// rounds of all matches against that opponent.
///
/// An empty recording list yields an empty profile list; a nonempty list in
/// which the player never appears is an error.
pub fn build_opponent_profiles(
    recordings: &[MatchRecording],
    player_id: &str,
    mode: ExtractionMode,
) -> Result<Vec<BehaviorProfile>, ProfileError> {
    let mut builder = OpponentProfileBuilder::new(player_id, mode);
    for rec in recordings {
        builder.add_recording(rec)?;
    }
    builder.finish()
}

/// Pools per-opponent profiles into one generalized profile (counts are
/// summed, then renormalized; context becomes `"generalized"`).
pub fn build_generalized_profile(
    profiles: &[BehaviorProfile],
) -> Result<BehaviorProfile, ProfileError> {
    let first = profiles.first().ok_or(ProfileError::NoProfiles)?;
    for p in profiles {
        if p.player_id() != first.player_id() {
            return Err(ProfileError::MixedPlayers(
                first.player_id().to_string(),
                p.player_id().to_string(),
            ));
        }
    }
    let fingerprints: Vec<Fingerprint> =
        profiles.iter().map(|p| p.fingerprint.clone()).collect();
    let mut merged = merge_fingerprints(&fingerprints)?;
    if merged.context() != GENERALIZED_CONTEXT {
        // Single-input merge keeps the opponent context; generalization
        // relabels it regardless of how many contexts fed in.
        merged = Fingerprint::from_counts(
            merged.player_id().to_string(),
            GENERALIZED_CONTEXT,
            merged.ngram_len(),
            merged.iter().map(|(k, v)| (k.clone(), v)).collect(),
        )?;
    }
    Ok(BehaviorProfile {
        fingerprint: merged,
        match_count: profiles.iter().map(|p| p.match_count).sum(),
        mode: first.mode,
    })
}

/// Alternative generalization for sensitivity comparison: the per-opponent
/// probability vectors averaged with equal weight per opponent, instead of
/// pooled counts. Returned as a raw probability map because equal-weight
/// averages are generally not expressible as integer counts.
pub fn averaged_probability_vector(
    profiles: &[BehaviorProfile],
) -> Result<BTreeMap<Ngram, f64>, ProfileError> {
    let first = profiles.first().ok_or(ProfileError::NoProfiles)?;
    let mut sums: BTreeMap<Ngram, f64> = BTreeMap::new();
    for p in profiles {
        if p.player_id() != first.player_id() {
            return Err(ProfileError::MixedPlayers(
                first.player_id().to_string(),
                p.player_id().to_string(),
            ));
        }
        if p.fingerprint.is_empty() {
            return Err(ProfileError::Fingerprint(FingerprintError::EmptyFingerprint));
        }
        for (ngram, count) in p.fingerprint.iter() {
            *sums.entry(ngram.clone()).or_insert(0.0) +=
                count as f64 / p.fingerprint.total_count() as f64;
        }
    }
    let k = profiles.len() as f64;
    Ok(sums.into_iter().map(|(g, s)| (g, s / k)).collect())
}

/// Min/max/mean of all pairwise similarities among one player's
/// per-opponent profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub player_id: String,
    pub min: f64,
    pub max: f64,
    pub avg: f64,
}

impl ConsistencyReport {
    /// The arithmetic core: statistics over an explicit multiset of pairwise
    /// similarity scores.
    pub fn from_pairwise(
        player_id: impl Into<String>,
        scores: &[f64],
    ) -> Result<Self, ProfileError> {
        if scores.is_empty() {
            return Err(ProfileError::TooFewProfiles(1));
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &s in scores {
            min = min.min(s);
            max = max.max(s);
            sum += s;
        }
        Ok(Self {
            player_id: player_id.into(),
            min,
            max,
            avg: sum / scores.len() as f64,
        })
    }
}

/// Pairwise-similarity statistics over all C(k, 2) pairs of one player's
/// profiles. Needs at least two profiles.
pub fn consistency_stats(profiles: &[BehaviorProfile]) -> Result<ConsistencyReport, ProfileError> {
    if profiles.len() < 2 {
        return Err(ProfileError::TooFewProfiles(profiles.len()));
    }
    let player_id = profiles[0].player_id().to_string();
    for p in profiles {
        if p.player_id() != player_id {
            return Err(ProfileError::MixedPlayers(
                player_id,
                p.player_id().to_string(),
            ));
        }
    }
    let mut scores = Vec::with_capacity(profiles.len() * (profiles.len() - 1) / 2);
    for i in 0..profiles.len() {
        for j in (i + 1)..profiles.len() {
            scores.push(cosine_similarity(
                &profiles[i].fingerprint,
                &profiles[j].fingerprint,
            )?);
        }
    }
    ConsistencyReport::from_pairwise(player_id, &scores)
}

/// A labeled, symmetric similarity matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    labels: Vec<String>,
    values: Vec<f64>, // row-major, len = labels^2
}

impl SimilarityMatrix {
    /// Builds a matrix from explicit values, validating shape, symmetry,
    /// unit diagonal and range. Used for fixtures as well as results.
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self, ProfileError> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(ProfileError::BadMatrix("square"));
        }
        let mut seen = BTreeMap::new();
        for label in &labels {
            if seen.insert(label.clone(), ()).is_some() {
                return Err(ProfileError::DuplicateLabel(label.clone()));
            }
        }
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(ProfileError::BadMatrix("unit-diagonal"));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(ProfileError::BadMatrix("within [0, 1]"));
                }
                if values[j * n + i] != v {
                    return Err(ProfileError::BadMatrix("symmetric"));
                }
            }
        }
        Ok(Self { labels, values })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Row-major copy of the values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Full pairwise cosine matrix over the given profiles, in input order.
///
/// The diagonal is set to exactly 1.0; every off-diagonal entry is computed
/// independently of evaluation order.
pub fn similarity_matrix(profiles: &[BehaviorProfile]) -> Result<SimilarityMatrix, ProfileError> {
    let n = profiles.len();
    let labels: Vec<String> = profiles.iter().map(BehaviorProfile::label).collect();
    {
        let mut seen = BTreeMap::new();
        for label in &labels {
            if seen.insert(label.clone(), ()).is_some() {
                return Err(ProfileError::DuplicateLabel(label.clone()));
            }
        }
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let sim = cosine_similarity(&profiles[i].fingerprint, &profiles[j].fingerprint)?;
            values[i * n + j] = sim;
            values[j * n + i] = sim;
        }
    }
    Ok(SimilarityMatrix { labels, values })
}

/// Group tag for the human/AI cross-group summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Human,
    Ai,
}

/// One row of the cross-group table: a participant's similarity to the AI
/// profile and the mean/median of its similarities to human participants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossGroupRow {
    pub label: String,
    pub similarity_with_ai: f64,
    pub avg_similarity_with_humans: f64,
    pub median_similarity_with_humans: f64,
}

/// Median with the even-count convention: mean of the two central values.
fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Per-label cross-group summary.
///
/// For each label: the mean similarity to AI-grouped labels (self included
/// when the label itself is AI — the AI row's self-similarity is the unit
/// diagonal), and the mean and median similarity to human-grouped labels
/// excluding the label itself.
pub fn cross_group_summary(
    matrix: &SimilarityMatrix,
    groups: &BTreeMap<String, Group>,
) -> Result<Vec<CrossGroupRow>, ProfileError> {
    for label in matrix.labels() {
        if !groups.contains_key(label) {
            return Err(ProfileError::UngroupedLabel(label.clone()));
        }
    }
    let mut rows = Vec::with_capacity(matrix.len());
    for (i, label) in matrix.labels().iter().enumerate() {
        let mut ai_scores = Vec::new();
        let mut human_scores = Vec::new();
        for (j, other) in matrix.labels().iter().enumerate() {
            match groups[other] {
                Group::Ai => ai_scores.push(matrix.get(i, j)),
                Group::Human => {
                    if i != j {
                        human_scores.push(matrix.get(i, j));
                    }
                }
            }
        }
        if ai_scores.is_empty() {
            return Err(ProfileError::EmptyGroup("ai"));
        }
        if human_scores.is_empty() {
            return Err(ProfileError::EmptyGroup("human"));
        }
        human_scores.sort_by(|a, b| a.partial_cmp(b).expect("similarities are finite"));
        rows.push(CrossGroupRow {
            label: label.clone(),
            similarity_with_ai: ai_scores.iter().sum::<f64>() / ai_scores.len() as f64,
            avg_similarity_with_humans: human_scores.iter().sum::<f64>()
                / human_scores.len() as f64,
            median_similarity_with_humans: median(&human_scores),
        });
    }
    Ok(rows)
}

/// Ranked gallery matches for a query fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentificationResult {
    pub query: String,
    /// `(label, similarity)` non-increasing in similarity; ties broken
    /// lexicographically by label.
    pub ranking: Vec<(String, f64)>,
}

impl IdentificationResult {
    pub fn best(&self) -> &(String, f64) {
        &self.ranking[0]
    }
}

/// Nearest-neighbor identification: ranks the gallery by cosine similarity
/// to the query.
pub fn identify_player(
    query: &Fingerprint,
    gallery: &[BehaviorProfile],
) -> Result<IdentificationResult, ProfileError> {
    if gallery.is_empty() {
        return Err(ProfileError::EmptyGallery);
    }
    let mut ranking = Vec::with_capacity(gallery.len());
    for profile in gallery {
        let sim = cosine_similarity(query, &profile.fingerprint)?;
        ranking.push((profile.label(), sim));
    }
    ranking.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("similarities are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(IdentificationResult {
        query: format!("{}:{}", query.player_id(), query.context()),
        ranking,
    })
}

/// Single-linkage clusters over the matrix, where labels are connected when
/// their similarity is at least `threshold`.
///
/// Deterministic output: members sorted lexicographically within a cluster,
/// clusters ordered by their first member.
pub fn partition_by_threshold(matrix: &SimilarityMatrix, threshold: f64) -> Vec<Vec<String>> {
    let n = matrix.len();
    // Union-find over label indices.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix.get(i, j) >= threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut clusters: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        clusters.entry(root).or_default().push(matrix.labels()[i].clone());
    }
    let mut result: Vec<Vec<String>> = clusters.into_values().collect();
    for cluster in &mut result {
        cluster.sort();
    }
    result.sort_by(|a, b| a[0].cmp(&b[0]));
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::build_fingerprint;
    use crate::recording::{ActionSequence, ActionTriple};

    fn seq(player: &str, moves: &[&str]) -> ActionSequence {
        ActionSequence {
            player_id: player.into(),
            match_id: "m".into(),
            round_index: 0,
            actions: moves
                .iter()
                .map(|mv| ActionTriple::new("Stand", "Resting", *mv))
                .collect(),
        }
    }

    fn profile(player: &str, context: &str, moves: &[&str]) -> BehaviorProfile {
        BehaviorProfile {
            fingerprint: build_fingerprint(&[seq(player, moves)], player, context).unwrap(),
            match_count: 1,
            mode: ExtractionMode::Dedup,
        }
    }

    #[test]
    fn generalized_profile_of_one_keeps_fingerprint_but_relabels_context() {
        let p = profile("p", "q", &["a", "b", "c", "d"]);
        let g = build_generalized_profile(std::slice::from_ref(&p)).unwrap();
        assert_eq!(g.context(), GENERALIZED_CONTEXT);
        assert_eq!(g.fingerprint.total_count(), p.fingerprint.total_count());
        assert_eq!(
            g.fingerprint.iter().collect::<Vec<_>>(),
            p.fingerprint.iter().collect::<Vec<_>>()
        );
    }

    #[test]
    fn equal_count_disjoint_profiles_generalize_to_half_probabilities() {
        let p1 = profile("p", "q1", &["a", "a", "a"]);
        let p2 = profile("p", "q2", &["b", "b", "b"]);
        let g = build_generalized_profile(&[p1.clone(), p2]).unwrap();
        for (ngram, _) in p1.fingerprint.iter() {
            assert_eq!(g.fingerprint.prob(ngram), 0.5);
        }
    }

    #[test]
    fn consistency_stats_of_identical_profiles_is_all_ones() {
        let p = profile("p", "q1", &["a", "b", "c", "d"]);
        let mut q = profile("p", "q2", &["a", "b", "c", "d"]);
        q.fingerprint = build_fingerprint(
            &[seq("p", &["a", "b", "c", "d"])],
            "p",
            "q2",
        )
        .unwrap();
        let report = consistency_stats(&[p, q]).unwrap();
        assert!((report.min - 1.0).abs() < 1e-12);
        assert!((report.max - 1.0).abs() < 1e-12);
        assert!((report.avg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn consistency_from_pairwise_multiset() {
        let report =
            ConsistencyReport::from_pairwise("x", &[0.2, 0.4, 0.6]).unwrap();
        assert_eq!((report.min, report.max), (0.2, 0.6));
        assert!((report.avg - 0.4).abs() < 1e-12);
    }

    #[test]
    fn consistency_needs_two_profiles() {
        let p = profile("p", "q", &["a", "b", "c"]);
        assert!(matches!(
            consistency_stats(&[p]),
            Err(ProfileError::TooFewProfiles(1))
        ));
    }

    #[test]
    fn identical_profiles_give_all_ones_matrix() {
        let profiles: Vec<BehaviorProfile> = (0..3)
            .map(|i| profile("p", &format!("q{i}"), &["a", "b", "c", "d"]))
            .collect();
        let m = similarity_matrix(&profiles).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn disjoint_profiles_give_identity_matrix() {
        let profiles = vec![
            profile("a", "q", &["a", "a", "a"]),
            profile("b", "q", &["b", "b", "b"]),
            profile("c", "q", &["c", "c", "c"]),
        ];
        let m = similarity_matrix(&profiles).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(m.get(i, j), expected);
            }
        }
    }

    #[test]
    fn identify_exact_match_scores_one() {
        let gallery = vec![
            profile("a", "generalized", &["a", "b", "c", "d"]),
            profile("b", "generalized", &["b", "b", "b", "b"]),
        ];
        let query = build_fingerprint(&[seq("q", &["a", "b", "c", "d"])], "q", "held-out").unwrap();
        let result = identify_player(&query, &gallery).unwrap();
        assert_eq!(result.best().0, "a");
        assert!((result.best().1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identify_breaks_ties_lexicographically() {
        let gallery = vec![
            profile("zeta", "generalized", &["x", "x", "x"]),
            profile("alpha", "generalized", &["y", "y", "y"]),
        ];
        let query = build_fingerprint(&[seq("q", &["z", "z", "z"])], "q", "held-out").unwrap();
        let result = identify_player(&query, &gallery).unwrap();
        assert_eq!(result.ranking[0], ("alpha".to_string(), 0.0));
        assert_eq!(result.ranking[1], ("zeta".to_string(), 0.0));
    }

    #[test]
    fn identify_rejects_empty_gallery() {
        let query = build_fingerprint(&[seq("q", &["a", "b", "c"])], "q", "x").unwrap();
        assert!(matches!(
            identify_player(&query, &[]),
            Err(ProfileError::EmptyGallery)
        ));
    }

    #[test]
    fn threshold_zero_is_one_cluster() {
        let m = SimilarityMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![1.0, 0.1, 0.0, 0.1, 1.0, 0.2, 0.0, 0.2, 1.0],
        )
        .unwrap();
        let clusters = partition_by_threshold(&m, 0.0);
        assert_eq!(clusters, vec![vec!["a", "b", "c"]]);
    }

    #[test]
    fn threshold_above_all_offdiagonals_is_singletons() {
        let m = SimilarityMatrix::new(
            vec!["a".into(), "b".into()],
            vec![1.0, 0.9, 0.9, 1.0],
        )
        .unwrap();
        let clusters = partition_by_threshold(&m, 0.95);
        assert_eq!(clusters, vec![vec!["a"], vec!["b"]]);
    }

    #[test]
    fn cross_group_on_all_ones_matrix() {
        let labels: Vec<String> = vec!["ai".into(), "h1".into(), "h2".into()];
        let m = SimilarityMatrix::new(labels, vec![1.0; 9]).unwrap();
        let mut groups = BTreeMap::new();
        groups.insert("ai".to_string(), Group::Ai);
        groups.insert("h1".to_string(), Group::Human);
        groups.insert("h2".to_string(), Group::Human);
        for row in cross_group_summary(&m, &groups).unwrap() {
            assert_eq!(row.similarity_with_ai, 1.0);
            assert_eq!(row.avg_similarity_with_humans, 1.0);
            assert_eq!(row.median_similarity_with_humans, 1.0);
        }
    }

    #[test]
    fn cross_group_rejects_missing_group() {
        let m = SimilarityMatrix::new(
            vec!["a".into(), "b".into()],
            vec![1.0, 0.5, 0.5, 1.0],
        )
        .unwrap();
        let mut groups = BTreeMap::new();
        groups.insert("a".to_string(), Group::Ai);
        assert!(matches!(
            cross_group_summary(&m, &groups),
            Err(ProfileError::UngroupedLabel(_))
        ));
    }

    #[test]
    fn profile_json_round_trip_keeps_metadata() {
        let mut p = profile("p", "q", &["a", "b", "c", "d"]);
        p.match_count = 10;
        p.mode = ExtractionMode::PerFrame;
        let parsed = BehaviorProfile::from_json(&p.to_json()).unwrap();
        assert_eq!(parsed, p);
    }

    #[test]
    fn averaged_vector_weights_opponents_equally() {
        // q1 contributes 2 windows, q2 contributes 1; the averaged vector
        // still weights both opponents at 1/2.
        let p1 = profile("p", "q1", &["a", "b", "c", "d"]);
        let p2 = profile("p", "q2", &["e", "f", "g"]);
        let avg = averaged_probability_vector(&[p1.clone(), p2]).unwrap();
        let (first_ngram, _) = p1.fingerprint.iter().next().unwrap();
        assert!((avg[first_ngram] - 0.25).abs() < 1e-12);
    }
}
