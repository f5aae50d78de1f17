//! Evidence and fixture files, and number formatting shared by the reports.
//!
//! Evidence files are JSON, one per (match, expert):
//!
//! ```json
//! {
//!   "match_id": "30",
//!   "expert_id": "e1",
//!   "intuitive_prediction": "1:0",
//!   "evidence": [
//!     {
//!       "label": "missing key players",
//!       "impact": 0.6,
//!       "assignments": [
//!         { "scores": ["1:0", "2:0"], "belief": 0.5 },
//!         { "scores": ["2:1", "3:0", "3:1"], "belief": 0.2 }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! Fixture files are CSV with the header `match_id,home_team,away_team,actual`;
//! `actual` is empty until the match is played.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::evaluation::FinalScore;
use crate::frame::{parse_score, Frame, HypothesisSet, Score};
use crate::mass::{evidence_to_mass, validate_mass, Evidence, MassFunction, RawAssignment};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceFile {
    pub match_id: String,
    pub expert_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intuitive_prediction: Option<String>,
    pub evidence: Vec<EvidenceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceEntry {
    pub label: String,
    pub impact: f64,
    pub assignments: Vec<AssignmentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentEntry {
    pub scores: Vec<String>,
    pub belief: f64,
}

/// A problem found in an input file, with the field or line it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub locus: String,
    pub message: String,
}

impl Diagnostic {
    fn new(locus: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            locus: locus.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.locus, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: invalid input")]
    Invalid {
        path: PathBuf,
        diagnostics: Vec<Diagnostic>,
    },
}

impl FileError {
    fn io(path: &Path, err: impl fmt::Display) -> Self {
        FileError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            FileError::Io { message, .. } => vec![Diagnostic::new("file", message)],
            FileError::Invalid { diagnostics, .. } => diagnostics.clone(),
        }
    }
}

/// One discounted piece of evidence, ready to combine.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEvidence {
    pub label: String,
    pub mass: MassFunction,
}

/// An expert's full submission for one match.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertSubmission {
    pub match_id: String,
    pub expert_id: String,
    pub intuitive: Option<Score>,
    pub evidence: Vec<WeightedEvidence>,
}

impl EvidenceFile {
    pub fn from_json(text: &str) -> Result<Self, Diagnostic> {
        serde_json::from_str(text)
            .map_err(|e| Diagnostic::new(format!("line {} column {}", e.line(), e.column()), e))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("evidence files always serialise");
        s.push('\n');
        s
    }

    /// Checks every field and builds the discounted mass functions. All
    /// violations are reported, not just the first.
    pub fn interpret(&self, frame: &Arc<Frame>) -> Result<ExpertSubmission, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        if self.match_id.trim().is_empty() {
            diags.push(Diagnostic::new("match_id", "must not be empty"));
        }
        if self.expert_id.trim().is_empty() {
            diags.push(Diagnostic::new("expert_id", "must not be empty"));
        }
        let intuitive = match &self.intuitive_prediction {
            None => None,
            Some(text) => match parse_score(text) {
                Ok(s) => Some(s),
                Err(e) => {
                    diags.push(Diagnostic::new("intuitive_prediction", e));
                    None
                }
            },
        };
        if self.evidence.is_empty() {
            diags.push(Diagnostic::new(
                "evidence",
                "at least one piece of evidence is required",
            ));
        }

        let mut pieces = Vec::with_capacity(self.evidence.len());
        for (ei, entry) in self.evidence.iter().enumerate() {
            let at = format!("evidence[{ei}]");
            let before = diags.len();
            if !(0.0..=1.0).contains(&entry.impact) {
                diags.push(Diagnostic::new(
                    format!("{at}.impact"),
                    format_args!("impact {} is outside [0, 1]", entry.impact),
                ));
            }
            let mut assignments = Vec::with_capacity(entry.assignments.len());
            for (ai, a) in entry.assignments.iter().enumerate() {
                let at = format!("{at}.assignments[{ai}]");
                let mut set = HypothesisSet::EMPTY;
                for (si, token) in a.scores.iter().enumerate() {
                    match parse_score(token) {
                        Ok(s) => set = set.union(HypothesisSet::singleton(s.index())),
                        Err(e) => diags.push(Diagnostic::new(format!("{at}.scores[{si}]"), e)),
                    }
                }
                if a.scores.is_empty() {
                    diags.push(Diagnostic::new(
                        format!("{at}.scores"),
                        "hypothesis set is empty",
                    ));
                }
                if !a.belief.is_finite() || a.belief < 0.0 {
                    diags.push(Diagnostic::new(
                        format!("{at}.belief"),
                        format_args!("belief {} is negative or not finite", a.belief),
                    ));
                }
                assignments.push(RawAssignment::new(set, a.belief));
            }
            if diags.len() > before {
                continue;
            }
            if let Err(e) = validate_mass(frame, &assignments) {
                diags.push(Diagnostic::new(format!("{at}.assignments"), e));
                continue;
            }
            let evidence = Evidence {
                label: entry.label.clone(),
                impact: entry.impact,
                assignments,
            };
            match evidence_to_mass(frame, &evidence) {
                Ok(mass) => pieces.push(WeightedEvidence {
                    label: entry.label.clone(),
                    mass,
                }),
                Err(e) => diags.push(Diagnostic::new(at, e)),
            }
        }

        if !diags.is_empty() {
            return Err(diags);
        }
        Ok(ExpertSubmission {
            match_id: self.match_id.clone(),
            expert_id: self.expert_id.clone(),
            intuitive,
            evidence: pieces,
        })
    }
}

pub fn read_evidence_file(path: &Path) -> Result<EvidenceFile, FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
    EvidenceFile::from_json(&text).map_err(|d| FileError::Invalid {
        path: path.to_path_buf(),
        diagnostics: vec![d],
    })
}

/// `*.json` files directly inside `dir`, sorted by name.
pub fn evidence_paths(dir: &Path) -> Result<Vec<PathBuf>, FileError> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| FileError::io(dir, e))? {
        let path = entry.map_err(|e| FileError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), FileError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| FileError::io(path, "not a file path"))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| FileError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| FileError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub match_id: String,
    pub home_team: String,
    pub away_team: String,
    pub actual: Option<FinalScore>,
}

#[derive(Debug, Deserialize)]
struct FixtureRow {
    match_id: String,
    home_team: String,
    away_team: String,
    actual: Option<String>,
}

pub fn read_fixtures(path: &Path) -> Result<Vec<Fixture>, FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
    parse_fixtures(&text).map_err(|diagnostics| FileError::Invalid {
        path: path.to_path_buf(),
        diagnostics,
    })
}

pub fn parse_fixtures(text: &str) -> Result<Vec<Fixture>, Vec<Diagnostic>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut fixtures = Vec::new();
    let mut diags = Vec::new();
    let mut seen = HashSet::new();
    for row in reader.deserialize::<FixtureRow>() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let locus = e
                    .position()
                    .map_or_else(|| "fixtures".to_string(), |p| format!("line {}", p.line()));
                diags.push(Diagnostic::new(locus, e));
                continue;
            }
        };
        let locus = format!("match {}", row.match_id);
        if !seen.insert(row.match_id.clone()) {
            diags.push(Diagnostic::new(locus.clone(), "duplicate match_id"));
        }
        let actual = match row.actual.as_deref().filter(|s| !s.is_empty()) {
            None => None,
            Some(text) => match text.parse::<FinalScore>() {
                Ok(s) => Some(s),
                Err(e) => {
                    diags.push(Diagnostic::new(format!("{locus}.actual"), e));
                    None
                }
            },
        };
        fixtures.push(Fixture {
            match_id: row.match_id,
            home_team: row.home_team,
            away_team: row.away_team,
            actual,
        });
    }
    if diags.is_empty() {
        Ok(fixtures)
    } else {
        Err(diags)
    }
}

/// Rounds half away from zero to three decimals.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

pub fn fmt3(x: f64) -> String {
    format!("{:.3}", round3(x))
}

/// Three decimals, with positive values below 0.001 shown as `<0.001`.
pub fn fmt_weight(w: f64) -> String {
    if w > 0.0 && w < 0.001 {
        "<0.001".to_string()
    } else {
        fmt3(w)
    }
}
