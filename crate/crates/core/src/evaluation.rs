//! Scoring forecasts against actual results.
//!
//! Scoring schemata implement [`ScoringSchema`] and are looked up by name in a
//! [`SchemaRegistry`]. The standard registry carries `s_r` (exact result),
//! `s_o` (outcome) and `s_ro` (two points for the result, one for the outcome).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::Score;

/// An actual result. Unlike [`Score`] it is not capped at five goals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinalScore {
    pub home: u32,
    pub away: u32,
}

impl FinalScore {
    pub fn new(home: u32, away: u32) -> Self {
        Self { home, away }
    }

    /// The same score inside the standard frame, if it fits.
    pub fn in_frame(self) -> Option<Score> {
        let home = u8::try_from(self.home).ok()?;
        let away = u8::try_from(self.away).ok()?;
        Score::new(home, away).ok()
    }
}

impl From<Score> for FinalScore {
    fn from(s: Score) -> Self {
        Self::new(s.home() as u32, s.away() as u32)
    }
}

impl fmt::Display for FinalScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.home, self.away)
    }
}

impl FromStr for FinalScore {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::ScoreParse {
            token: text.to_string(),
            reason: reason.to_string(),
        };
        let (h, a) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| err("expected `home:away`"))?;
        let goals = |p: &str| -> Result<u32> {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err("goal counts must be non-negative integers"));
            }
            p.parse().map_err(|_| err("goal count too large"))
        };
        Ok(Self::new(goals(h)?, goals(a)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    HomeWin,
    Draw,
    AwayWin,
}

pub fn outcome_of(score: impl Into<FinalScore>) -> Outcome {
    let s = score.into();
    match s.home.cmp(&s.away) {
        std::cmp::Ordering::Greater => Outcome::HomeWin,
        std::cmp::Ordering::Equal => Outcome::Draw,
        std::cmp::Ordering::Less => Outcome::AwayWin,
    }
}

/// How well a prediction matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hit {
    Exact,
    OutcomeOnly,
    Miss,
}

pub fn classify(pred: Score, actual: FinalScore) -> Hit {
    if FinalScore::from(pred) == actual {
        Hit::Exact
    } else if outcome_of(pred) == outcome_of(actual) {
        Hit::OutcomeOnly
    } else {
        Hit::Miss
    }
}

pub trait ScoringSchema: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Points for one prediction.
    fn points(&self, pred: Score, actual: FinalScore) -> u32;

    /// Best possible points for one match.
    fn max_points(&self) -> u32;
}

/// `s_r`: one point for the exact result.
#[derive(Debug, Default, Clone, Copy)]
pub struct ResultsOnly;

impl ScoringSchema for ResultsOnly {
    fn name(&self) -> &'static str {
        "s_r"
    }
    fn description(&self) -> &'static str {
        "1 point for the exact result"
    }
    fn points(&self, pred: Score, actual: FinalScore) -> u32 {
        u32::from(classify(pred, actual) == Hit::Exact)
    }
    fn max_points(&self) -> u32 {
        1
    }
}

/// `s_o`: one point for the right outcome (exact hits included).
#[derive(Debug, Default, Clone, Copy)]
pub struct OutcomesOnly;

impl ScoringSchema for OutcomesOnly {
    fn name(&self) -> &'static str {
        "s_o"
    }
    fn description(&self) -> &'static str {
        "1 point for the right win/draw/loss outcome"
    }
    fn points(&self, pred: Score, actual: FinalScore) -> u32 {
        u32::from(classify(pred, actual) != Hit::Miss)
    }
    fn max_points(&self) -> u32 {
        1
    }
}

/// `s_ro`: two points for the exact result, otherwise one for the outcome.
#[derive(Debug, Default, Clone, Copy)]
pub struct ResultsAndOutcomes;

impl ScoringSchema for ResultsAndOutcomes {
    fn name(&self) -> &'static str {
        "s_ro"
    }
    fn description(&self) -> &'static str {
        "2 points for the exact result, 1 for the outcome"
    }
    fn points(&self, pred: Score, actual: FinalScore) -> u32 {
        match classify(pred, actual) {
            Hit::Exact => 2,
            Hit::OutcomeOnly => 1,
            Hit::Miss => 0,
        }
    }
    fn max_points(&self) -> u32 {
        2
    }
}

pub fn score_prediction(pred: Score, actual: FinalScore, schema: &dyn ScoringSchema) -> u32 {
    schema.points(pred, actual)
}

/// Named scoring schemata, kept in registration order.
#[derive(Clone, Default)]
pub struct SchemaRegistry {
    schemata: Vec<Arc<dyn ScoringSchema>>,
}

impl fmt::Debug for SchemaRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl SchemaRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `s_r`, `s_o`, `s_ro`.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(ResultsOnly));
        r.register(Arc::new(OutcomesOnly));
        r.register(Arc::new(ResultsAndOutcomes));
        r
    }

    /// Adds a schema, replacing any schema of the same name in place.
    pub fn register(&mut self, schema: Arc<dyn ScoringSchema>) {
        match self.schemata.iter().position(|s| s.name() == schema.name()) {
            Some(i) => self.schemata[i] = schema,
            None => self.schemata.push(schema),
        }
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn ScoringSchema>> {
        self.schemata.iter().find(|s| s.name() == name).cloned()
    }

    /// A registry restricted to `names`, in the given order.
    pub fn select<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<Self> {
        let mut r = Self::new();
        for name in names {
            r.register(
                self.get(name)
                    .ok_or_else(|| Error::UnknownSchema(name.to_string()))?,
            );
        }
        Ok(r)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.schemata.iter().map(|s| s.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn ScoringSchema>> {
        self.schemata.iter()
    }

    pub fn len(&self) -> usize {
        self.schemata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schemata.is_empty()
    }
}

/// One match: the real result and each source's predicted score.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchRecord {
    pub match_id: String,
    pub actual: Option<FinalScore>,
    pub predictions: BTreeMap<String, Score>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaTally {
    pub schema: &'static str,
    pub points: u32,
    pub possible: u32,
}

impl SchemaTally {
    pub fn ratio(&self) -> f64 {
        if self.possible == 0 {
            0.0
        } else {
            self.points as f64 / self.possible as f64
        }
    }
}

/// Tallies for one prediction source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTally {
    pub source: String,
    pub matches: usize,
    pub correct_results: u32,
    /// Outcome hits that were not also exact hits.
    pub correct_outcomes: u32,
    pub schemata: Vec<SchemaTally>,
}

impl SourceTally {
    pub fn schema(&self, name: &str) -> Option<&SchemaTally> {
        self.schemata.iter().find(|t| t.schema == name)
    }

    pub fn points(&self, name: &str) -> Option<u32> {
        self.schema(name).map(|t| t.points)
    }

    pub fn ratio(&self, name: &str) -> Option<f64> {
        self.schema(name).map(SchemaTally::ratio)
    }
}

/// A column-wise statistic (mean or max) over all sources of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSummary {
    pub correct_results: f64,
    pub correct_outcomes: f64,
    /// `(points, ratio)` per schema, in registry order. Every source shares
    /// the same `n`, so the ratio is taken from the summarised points.
    pub schemata: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// Number of evaluated matches.
    pub n: usize,
    pub schemata: Vec<&'static str>,
    pub sources: Vec<SourceTally>,
}

impl EvaluationReport {
    pub fn source(&self, name: &str) -> Option<&SourceTally> {
        self.sources.iter().find(|s| s.source == name)
    }

    fn summarise(
        &self,
        fold: impl Fn(&mut dyn Iterator<Item = f64>) -> f64,
    ) -> Option<ColumnSummary> {
        if self.sources.is_empty() {
            return None;
        }
        let column = |f: &dyn Fn(&SourceTally) -> f64| fold(&mut self.sources.iter().map(f));
        Some(ColumnSummary {
            correct_results: column(&|s| s.correct_results as f64),
            correct_outcomes: column(&|s| s.correct_outcomes as f64),
            schemata: (0..self.schemata.len())
                .map(|i| {
                    let points = column(&|s| s.schemata[i].points as f64);
                    let possible = self.sources[0].schemata[i].possible;
                    let ratio = if possible == 0 {
                        0.0
                    } else {
                        points / possible as f64
                    };
                    (points, ratio)
                })
                .collect(),
        })
    }

    /// Arithmetic mean of every column across sources.
    pub fn mean(&self) -> Option<ColumnSummary> {
        let k = self.sources.len() as f64;
        self.summarise(|it| it.sum::<f64>() / k)
    }

    /// Largest value of every column across sources.
    pub fn max(&self) -> Option<ColumnSummary> {
        self.summarise(|it| it.fold(f64::NEG_INFINITY, f64::max))
    }
}

/// [`aggregate_with`] over the standard schemata.
pub fn aggregate(records: &[MatchRecord]) -> Result<EvaluationReport> {
    aggregate_with(records, &SchemaRegistry::standard())
}

/// Tallies every source over every record.
///
/// All records must carry an actual result and the same set of sources, so
/// that every ratio shares the same `n`.
pub fn aggregate_with(
    records: &[MatchRecord],
    registry: &SchemaRegistry,
) -> Result<EvaluationReport> {
    let mut sources: Option<BTreeSet<&str>> = None;
    for r in records {
        if r.actual.is_none() {
            return Err(Error::MissingActual(r.match_id.clone()));
        }
        if r.predictions.is_empty() {
            return Err(Error::NoPredictions(r.match_id.clone()));
        }
        let here: BTreeSet<&str> = r.predictions.keys().map(String::as_str).collect();
        match &sources {
            None => sources = Some(here),
            Some(expected) if *expected != here => {
                return Err(Error::InconsistentSources(format!(
                    "match {} has sources {:?}, expected {:?}",
                    r.match_id, here, expected
                )))
            }
            Some(_) => {}
        }
    }

    let n = records.len();
    let tallies = sources
        .unwrap_or_default()
        .into_iter()
        .map(|source| {
            let mut tally = SourceTally {
                source: source.to_string(),
                matches: n,
                correct_results: 0,
                correct_outcomes: 0,
                schemata: registry
                    .iter()
                    .map(|s| SchemaTally {
                        schema: s.name(),
                        points: 0,
                        possible: s.max_points() * n as u32,
                    })
                    .collect(),
            };
            for r in records {
                let pred = r.predictions[source];
                let actual = r.actual.expect("checked above");
                match classify(pred, actual) {
                    Hit::Exact => tally.correct_results += 1,
                    Hit::OutcomeOnly => tally.correct_outcomes += 1,
                    Hit::Miss => {}
                }
                for (t, schema) in tally.schemata.iter_mut().zip(registry.iter()) {
                    t.points += schema.points(pred, actual);
                }
            }
            tally
        })
        .collect();

    Ok(EvaluationReport {
        n,
        schemata: registry.names(),
        sources: tallies,
    })
}
