//! Behavior fingerprints: sparse probability distributions over n-grams of
//! consecutive player actions, compared with cosine similarity.
//!
//! A fingerprint counts every length-n window within each action sequence
//! (windows never span rounds) and normalizes counts to probabilities. The
//! full n-gram space is realized sparsely: absent coordinates have
//! probability 0 and contribute nothing to dot products, so similarity over
//! the sparse support equals similarity over the fully enumerated space.
//!
//! The toolchain uses n = 3 (trigrams) throughout; n is stored per
//! fingerprint so shorter windows can be exercised for ablation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recording::{ActionSequence, ActionTriple};

/// Window length used by the public pipeline.
pub const DEFAULT_NGRAM_LEN: usize = 3;

/// Context label of a profile pooled across all opponents.
pub const GENERALIZED_CONTEXT: &str = "generalized";

/// Current fingerprint file schema version.
pub const FINGERPRINT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FingerprintError {
    #[error("sequence for player {found:?} passed to a fingerprint of player {expected:?}")]
    PlayerMismatch { expected: String, found: String },
    #[error("cannot merge fingerprints of players {0:?} and {1:?}")]
    MergePlayerMismatch(String, String),
    #[error("cannot combine fingerprints with n={0} and n={1}")]
    NgramLenMismatch(usize, usize),
    #[error("empty fingerprint")]
    EmptyFingerprint,
    #[error("no fingerprints given")]
    NoInputs,
    #[error("n-gram length must be >= 1")]
    ZeroNgramLen,
    #[error("n-gram key {0:?} does not have the declared window length")]
    BadKeyLength(String),
    #[error("invalid n-gram key {0:?}")]
    BadKey(String),
    #[error("fingerprint file: {0}")]
    File(String),
    #[error("fingerprint file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// An ordered window of consecutive actions; the keys of a fingerprint.
///
/// Order matters: `(a, b, c)` and `(c, b, a)` are distinct unless the
/// components are equal. With the default window length 3 these are the
/// trigrams the rest of the toolchain speaks in terms of.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ngram(Box<[ActionTriple]>);

impl Ngram {
    /// Panics if `actions` is empty; windows always have length >= 1.
    pub fn new(actions: Vec<ActionTriple>) -> Self {
        assert!(!actions.is_empty(), "an n-gram holds at least one action");
        Self(actions.into_boxed_slice())
    }

    pub fn trigram(a1: ActionTriple, a2: ActionTriple, a3: ActionTriple) -> Self {
        Self(Box::new([a1, a2, a3]))
    }

    pub fn actions(&self) -> &[ActionTriple] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Canonical serialized form: each action as `state/sub_state/basic_move`,
    /// actions joined with `|`.
    pub fn canonical_key(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(ActionTriple::canonical_key).collect();
        parts.join("|")
    }

    /// Inverse of [`canonical_key`](Self::canonical_key).
    pub fn parse_key(key: &str) -> Result<Self, FingerprintError> {
        let actions: Vec<ActionTriple> = key
            .split('|')
            .map(|part| {
                ActionTriple::parse_key(part).ok_or_else(|| FingerprintError::BadKey(key.to_string()))
            })
            .collect::<Result<_, _>>()?;
        if actions.is_empty() {
            return Err(FingerprintError::BadKey(key.to_string()));
        }
        Ok(Self::new(actions))
    }
}

impl fmt::Display for Ngram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_key())
    }
}

/// A behavior fingerprint: n-gram counts plus their normalization.
///
/// Probabilities are derived (`count / total_count`) rather than stored, so
/// the normalization invariant holds by construction. Counts accumulate in
/// 64-bit integers; a full tournament produces on the order of 10^6 windows,
/// far below overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    player_id: String,
    context: String,
    n: usize,
    counts: BTreeMap<Ngram, u64>,
    total: u64,
}

impl Fingerprint {
    /// Builds a fingerprint directly from n-gram counts.
    ///
    /// Every key must have length `n`. Zero-count entries are dropped.
    pub fn from_counts(
        player_id: impl Into<String>,
        context: impl Into<String>,
        n: usize,
        counts: BTreeMap<Ngram, u64>,
    ) -> Result<Self, FingerprintError> {
        if n == 0 {
            return Err(FingerprintError::ZeroNgramLen);
        }
        let mut clean = BTreeMap::new();
        let mut total = 0u64;
        for (ngram, count) in counts {
            if ngram.len() != n {
                return Err(FingerprintError::BadKeyLength(ngram.canonical_key()));
            }
            if count > 0 {
                total += count;
                clean.insert(ngram, count);
            }
        }
        Ok(Self {
            player_id: player_id.into(),
            context: context.into(),
            n,
            counts: clean,
            total,
        })
    }

    pub fn player_id(&self) -> &str {
        &self.player_id
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    /// Window length of the keys (3 for the standard pipeline).
    pub fn ngram_len(&self) -> usize {
        self.n
    }

    /// Total number of windows counted. Zero means the fingerprint is empty
    /// (every source sequence was shorter than `n`).
    pub fn total_count(&self) -> u64 {
        self.total
    }

    /// Number of distinct n-grams in the support.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, ngram: &Ngram) -> u64 {
        self.counts.get(ngram).copied().unwrap_or(0)
    }

    /// Probability of `ngram`; n-grams outside the support have probability 0.
    pub fn prob(&self, ngram: &Ngram) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(ngram) as f64 / self.total as f64
        }
    }

    /// Iterates entries in canonical (sorted) key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Ngram, u64)> {
        self.counts.iter().map(|(k, v)| (k, *v))
    }

    /// Serializes to the fingerprint JSON schema (entries sorted by key).
    pub fn to_json(&self) -> String {
        let file = FingerprintFile::from_fingerprint(self, None, None);
        serde_json::to_string_pretty(&file).expect("fingerprint serializes infallibly")
    }

    /// Parses a fingerprint (or profile) JSON file. Stored probabilities are
    /// recomputed from counts; counts are authoritative.
    pub fn from_json(text: &str) -> Result<Self, FingerprintError> {
        let file: FingerprintFile = serde_json::from_str(text)?;
        file.into_fingerprint().map(|(fp, _, _)| fp)
    }
}

/// Exact on-disk schema for fingerprint and profile files.
///
/// `match_count` and `mode` are present only in profile files.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct FingerprintFile {
    pub schema_version: u32,
    pub player: String,
    pub context: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub total_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub match_count: Option<u32>,
    pub entries: Vec<FingerprintEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct FingerprintEntry {
    pub key: String,
    pub count: u64,
    pub prob: f64,
}

impl FingerprintFile {
    pub(crate) fn from_fingerprint(
        fp: &Fingerprint,
        match_count: Option<u32>,
        mode: Option<String>,
    ) -> Self {
        let mut entries: Vec<FingerprintEntry> = fp
            .iter()
            .map(|(ngram, count)| FingerprintEntry {
                key: ngram.canonical_key(),
                count,
                prob: count as f64 / fp.total_count() as f64,
            })
            .collect();
        // BTreeMap order sorts by action components; files sort by the
        // canonical key string so they diff cleanly.
        entries.sort_by(|a, b| a.key.cmp(&b.key));
        Self {
            schema_version: FINGERPRINT_SCHEMA_VERSION,
            player: fp.player_id.clone(),
            context: fp.context.clone(),
            n: fp.n,
            mode,
            total_count: fp.total,
            match_count,
            entries,
        }
    }

    pub(crate) fn into_fingerprint(
        self,
    ) -> Result<(Fingerprint, Option<u32>, Option<String>), FingerprintError> {
        if self.schema_version != FINGERPRINT_SCHEMA_VERSION {
            return Err(FingerprintError::File(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        let mut counts = BTreeMap::new();
        let mut total = 0u64;
        for entry in &self.entries {
            let ngram = Ngram::parse_key(&entry.key)?;
            if ngram.len() != self.n {
                return Err(FingerprintError::BadKeyLength(entry.key.clone()));
            }
            if counts.insert(ngram, entry.count).is_some() {
                return Err(FingerprintError::File(format!(
                    "duplicate entry key {:?}",
                    entry.key
                )));
            }
            total += entry.count;
        }
        if total != self.total_count {
            return Err(FingerprintError::File(format!(
                "total_count {} does not match sum of entry counts {}",
                self.total_count, total
            )));
        }
        let fp = Fingerprint::from_counts(self.player, self.context, self.n, counts)?;
        Ok((fp, self.match_count, self.mode))
    }
}

/// Builds a trigram fingerprint from action sequences.
///
/// Sequences shorter than 3 contribute zero windows; if all are, the result
/// is empty (`total_count == 0`) and flagged via [`Fingerprint::is_empty`].
pub fn build_fingerprint(
    sequences: &[ActionSequence],
    player_id: &str,
    context: &str,
) -> Result<Fingerprint, FingerprintError> {
    build_fingerprint_n(sequences, player_id, context, DEFAULT_NGRAM_LEN)
}

/// [`build_fingerprint`] with an explicit window length, for ablation.
pub fn build_fingerprint_n(
    sequences: &[ActionSequence],
    player_id: &str,
    context: &str,
    n: usize,
) -> Result<Fingerprint, FingerprintError> {
    if n == 0 {
        return Err(FingerprintError::ZeroNgramLen);
    }
    let mut counts: BTreeMap<Ngram, u64> = BTreeMap::new();
    let mut total = 0u64;
    for seq in sequences {
        if seq.player_id != player_id {
            return Err(FingerprintError::PlayerMismatch {
                expected: player_id.to_string(),
                found: seq.player_id.clone(),
            });
        }
        // Windows stay inside one sequence; rounds are boundaries.
        for window in seq.actions.windows(n) {
            let ngram = Ngram::new(window.to_vec());
            *counts.entry(ngram).or_insert(0) += 1;
            total += 1;
        }
    }
    Ok(Fingerprint {
        player_id: player_id.to_string(),
        context: context.to_string(),
        n,
        counts,
        total,
    })
}

/// Merges fingerprints of one player by summing counts, then renormalizing.
///
/// Commutative and associative, so partial aggregates over subsets of
/// matches can be combined in any order. The merged context is kept when all
/// inputs share one and is [`GENERALIZED_CONTEXT`] otherwise.
pub fn merge_fingerprints(fingerprints: &[Fingerprint]) -> Result<Fingerprint, FingerprintError> {
    let first = fingerprints.first().ok_or(FingerprintError::NoInputs)?;
    let mut counts: BTreeMap<Ngram, u64> = BTreeMap::new();
    let mut total = 0u64;
    let mut context: Option<&str> = Some(&first.context);
    for fp in fingerprints {
        if fp.player_id != first.player_id {
            return Err(FingerprintError::MergePlayerMismatch(
                first.player_id.clone(),
                fp.player_id.clone(),
            ));
        }
        if fp.n != first.n {
            return Err(FingerprintError::NgramLenMismatch(first.n, fp.n));
        }
        if context != Some(&fp.context) {
            context = None;
        }
        for (ngram, count) in fp.iter() {
            *counts.entry(ngram.clone()).or_insert(0) += count;
            total += count;
        }
    }
    Ok(Fingerprint {
        player_id: first.player_id.clone(),
        context: context.unwrap_or(GENERALIZED_CONTEXT).to_string(),
        n: first.n,
        counts,
        total,
    })
}

/// Cosine similarity between two nonempty fingerprints, in `[0, 1]`.
///
/// The dot product runs over the union of supports (absent coordinates
/// contribute 0) and is divided by the Euclidean norms. Cosine is invariant
/// under positive scaling, so it is computed on raw counts and is unaffected
/// by sample-size imbalance between the two sides. The result is clamped to
/// `[0, 1]` against rounding drift.
///
/// Comparing empty fingerprints is an error rather than a default score;
/// silent 0s or 1s hide upstream data bugs.
pub fn cosine_similarity(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.is_empty() || b.is_empty() {
        return Err(FingerprintError::EmptyFingerprint);
    }
    if a.n != b.n {
        return Err(FingerprintError::NgramLenMismatch(a.n, b.n));
    }
    // Merge-join over the sorted supports. Accumulation order depends only
    // on the union of keys, never on argument order, so cosine(a, b) and
    // cosine(b, a) are bitwise equal.
    let mut dot = 0.0f64;
    let mut iter_a = a.counts.iter().peekable();
    let mut iter_b = b.counts.iter().peekable();
    while let (Some((ka, &ca)), Some((kb, &cb))) = (iter_a.peek(), iter_b.peek()) {
        match ka.cmp(kb) {
            std::cmp::Ordering::Less => {
                iter_a.next();
            }
            std::cmp::Ordering::Greater => {
                iter_b.next();
            }
            std::cmp::Ordering::Equal => {
                dot += ca as f64 * cb as f64;
                iter_a.next();
                iter_b.next();
            }
        }
    }
    let norm = |fp: &Fingerprint| -> f64 {
        fp.counts
            .values()
            .map(|&c| {
                let c = c as f64;
                c * c
            })
            .sum::<f64>()
            .sqrt()
    };
    let similarity = dot / (norm(a) * norm(b));
    Ok(similarity.clamp(0.0, 1.0))
}
