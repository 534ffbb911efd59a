//! Input loading and the exit-code classification of errors.

use std::path::{Path, PathBuf};

use std::collections::BTreeMap;

use stylemark::fingerprint::FingerprintError;
use stylemark::profile::{BehaviorProfile, Group, ProfileError};
use stylemark::recording::{MatchRecording, RecordingError};
use stylemark::sim::SimError;

/// Marker for future shared CLI state.
pub struct Ctx;

/// CLI error with its process exit code: 1 for environment/I-O problems,
/// 2 for usage and input-validation problems.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
}

impl CliError {
    pub fn io(context: String, source: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {source}"))
    }

    pub fn usage(message: String) -> Self {
        CliError::Usage(message)
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) | CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<RecordingError> for CliError {
    fn from(e: RecordingError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FingerprintError> for CliError {
    fn from(e: FingerprintError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io { path, source } => {
                CliError::Io(format!("{}: {source}", path.display()))
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Expands files and directories into a sorted list of `.jsonl` recordings.
pub fn read_recording_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    collect(inputs, &|p| {
        p.extension().is_some_and(|e| e == "jsonl")
    })
}

fn collect(
    inputs: &[PathBuf],
    keep: &dyn Fn(&Path) -> bool,
) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = std::fs::read_dir(input)
                .map_err(|e| CliError::io(format!("reading {}", input.display()), e))?;
            for entry in entries {
                let entry =
                    entry.map_err(|e| CliError::io(format!("reading {}", input.display()), e))?;
                let path = entry.path();
                if path.is_file() && keep(&path) {
                    paths.push(path);
                }
            }
        } else if input.is_file() {
            paths.push(input.clone());
        } else {
            return Err(CliError::io(
                format!("reading {}", input.display()),
                std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
            ));
        }
    }
    paths.sort();
    Ok(paths)
}

pub fn read_recording(path: &Path) -> Result<MatchRecording, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    stylemark::parse_recording(&bytes)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn read_profile(path: &Path) -> Result<BehaviorProfile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    BehaviorProfile::from_json(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Loads profiles from files and directories (directories contribute every
/// `.json` file they directly contain).
pub fn read_profiles(inputs: &[PathBuf]) -> Result<Vec<BehaviorProfile>, CliError> {
    let paths = collect(inputs, &|p| {
        p.extension().is_some_and(|e| e == "json")
            && p.file_name().is_some_and(|n| n != "manifest.json")
    })?;
    paths.iter().map(|p| read_profile(p)).collect()
}

/// Groups file: a flat JSON object mapping profile labels to "human" | "ai".
pub fn read_groups(path: &Path) -> Result<BTreeMap<String, Group>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
