//! The `validate`, `predict` and `evaluate` commands.
//!
//! Commands render into strings and report an [`ExitCode`]; the binary only
//! parses arguments and prints.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::combination::combine_all;
use crate::decision::{distribute_over_singletons, rank, RankedPrediction};
use crate::error::Error;
use crate::evaluation::{aggregate_with, EvaluationReport, MatchRecord, SchemaRegistry};
use crate::frame::{make_standard_frame, Frame, Score};
use crate::io::{
    evidence_paths, fmt3, fmt_weight, read_evidence_file, read_fixtures, Diagnostic,
    ExpertSubmission, FileError,
};
use crate::mass::MassFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Validation = 1,
    Combination = 2,
    Io = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// One forecast per expert from that expert's own evidence.
    PerExpert,
    /// One forecast from every piece of evidence of every expert.
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Rows,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Combination(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::File(FileError::Io { .. }) => ExitCode::Io,
            CliError::File(FileError::Invalid { .. }) | CliError::Validation(_) => {
                ExitCode::Validation
            }
            CliError::Combination(_) => ExitCode::Combination,
        }
    }

    /// Full message including itemised diagnostics.
    pub fn render(&self) -> String {
        let mut out = format!("error: {self}\n");
        if let CliError::File(f @ FileError::Invalid { .. }) = self {
            for d in f.diagnostics() {
                let _ = writeln!(out, "  {d}");
            }
        }
        out
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: ExitCode,
}

/// Every submission in an evidence directory, grouped by match then expert.
#[derive(Debug, Clone)]
pub struct Corpus {
    frame: Arc<Frame>,
    matches: BTreeMap<String, BTreeMap<String, ExpertSubmission>>,
}

impl Corpus {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let frame = make_standard_frame();
        let mut matches: BTreeMap<String, BTreeMap<String, ExpertSubmission>> = BTreeMap::new();
        let mut origin: BTreeMap<(String, String), PathBuf> = BTreeMap::new();
        for path in evidence_paths(dir)? {
            let file = read_evidence_file(&path)?;
            let sub = file
                .interpret(&frame)
                .map_err(|diagnostics| FileError::Invalid {
                    path: path.clone(),
                    diagnostics,
                })?;
            let key = (sub.match_id.clone(), sub.expert_id.clone());
            if let Some(first) = origin.insert(key, path.clone()) {
                return Err(CliError::Validation(format!(
                    "{} and {} both hold expert {} for match {}",
                    first.display(),
                    path.display(),
                    sub.expert_id,
                    sub.match_id
                )));
            }
            matches
                .entry(sub.match_id.clone())
                .or_default()
                .insert(sub.expert_id.clone(), sub);
        }
        Ok(Self { frame, matches })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn match_ids(&self) -> impl Iterator<Item = &str> {
        self.matches.keys().map(String::as_str)
    }

    /// Submissions for a match keyed by expert id.
    pub fn submissions(&self, match_id: &str) -> Option<&BTreeMap<String, ExpertSubmission>> {
        self.matches.get(match_id)
    }

    fn require(&self, match_id: &str) -> Result<&BTreeMap<String, ExpertSubmission>, CliError> {
        self.submissions(match_id)
            .ok_or_else(|| CliError::Validation(format!("no evidence for match {match_id}")))
    }

    /// Combines each expert's own evidence (d_e).
    pub fn predict_per_expert(
        &self,
        match_id: &str,
    ) -> Result<Vec<(String, RankedPrediction)>, CliError> {
        self.require(match_id)?
            .values()
            .map(|sub| {
                let pieces: Vec<_> = sub
                    .evidence
                    .iter()
                    .map(|e| (format!("{}: {}", sub.expert_id, e.label), &e.mass))
                    .collect();
                Ok((sub.expert_id.clone(), decide(match_id, &pieces)?))
            })
            .collect()
    }

    fn pieces(&self, match_id: &str) -> Result<Vec<(String, &MassFunction)>, CliError> {
        Ok(self
            .require(match_id)?
            .values()
            .flat_map(|sub| {
                sub.evidence
                    .iter()
                    .map(move |e| (format!("{}: {}", sub.expert_id, e.label), &e.mass))
            })
            .collect())
    }

    /// Pools every piece of evidence from every expert.
    pub fn combined_mass(&self, match_id: &str) -> Result<MassFunction, CliError> {
        combine_labelled(match_id, &self.pieces(match_id)?)
    }

    /// Ranks the pooled evidence (d_c).
    pub fn predict_combined(&self, match_id: &str) -> Result<RankedPrediction, CliError> {
        Ok(rank(&distribute_over_singletons(
            &self.combined_mass(match_id)?,
        )))
    }
}

fn combine_labelled(
    match_id: &str,
    pieces: &[(String, &MassFunction)],
) -> Result<MassFunction, CliError> {
    let masses: Vec<MassFunction> = pieces.iter().map(|(_, m)| (*m).clone()).collect();
    combine_all(&masses).map_err(|e| match e {
        Error::TotalConflictAt { step, .. } => {
            let earlier: Vec<&str> = pieces[..step].iter().map(|(l, _)| l.as_str()).collect();
            CliError::Combination(format!(
                "match {match_id}: evidence `{}` is irreconcilable with `{}` (total conflict)",
                pieces[step].0,
                earlier.join("` ⊕ `")
            ))
        }
        other => CliError::Combination(format!("match {match_id}: {other}")),
    })
}

fn decide(
    match_id: &str,
    pieces: &[(String, &MassFunction)],
) -> Result<RankedPrediction, CliError> {
    let m = combine_labelled(match_id, pieces)?;
    Ok(rank(&distribute_over_singletons(&m)))
}

fn top_score(p: &RankedPrediction) -> Score {
    p.top_score().expect("standard frame labels are scores")
}

fn render_ranking(
    out: &mut String,
    match_id: &str,
    source: &str,
    p: &RankedPrediction,
    format: Format,
) {
    match format {
        Format::Table => {
            let _ = writeln!(out, "match {match_id} / {source}");
            let _ = writeln!(out, "{:>4}  {:<5}  {:>6}", "rank", "score", "belief");
            for (i, (label, w)) in p.entries().enumerate() {
                let _ = writeln!(out, "{:>4}  {:<5}  {:>6}", i + 1, label, fmt_weight(w));
            }
            let _ = writeln!(out, "top prediction: {}\n", p.top_label());
        }
        Format::Rows => {
            for (i, (label, w)) in p.entries().enumerate() {
                let _ = writeln!(out, "{match_id},{source},{},{label},{w}", i + 1);
            }
        }
    }
}

pub fn cmd_validate(paths: &[PathBuf]) -> CommandOutput {
    let frame = make_standard_frame();
    let mut stdout = String::new();
    let mut code = ExitCode::Success;
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            match evidence_paths(p) {
                Ok(found) => files.extend(found),
                Err(e) => {
                    let _ = writeln!(stdout, "{e}");
                    code = ExitCode::Io;
                }
            }
        } else {
            files.push(p.clone());
        }
    }
    for path in files {
        let result = read_evidence_file(&path).and_then(|f| {
            f.interpret(&frame)
                .map(|_| ())
                .map_err(|diagnostics| FileError::Invalid {
                    path: path.clone(),
                    diagnostics,
                })
        });
        match result {
            Ok(()) => {
                let _ = writeln!(stdout, "{}: OK", path.display());
            }
            Err(e) => {
                let diags: Vec<Diagnostic> = e.diagnostics();
                let _ = writeln!(stdout, "{}: {} problem(s)", path.display(), diags.len());
                for d in diags {
                    let _ = writeln!(stdout, "  {d}");
                }
                code = match (code, &e) {
                    (ExitCode::Io, _) | (_, FileError::Io { .. }) => ExitCode::Io,
                    _ => ExitCode::Validation,
                };
            }
        }
    }
    CommandOutput {
        stdout,
        stderr: String::new(),
        code,
    }
}

fn failure(e: CliError) -> CommandOutput {
    CommandOutput {
        stdout: String::new(),
        stderr: e.render(),
        code: e.exit_code(),
    }
}

pub fn cmd_predict(
    evidence_dir: &Path,
    match_id: &str,
    mode: Mode,
    format: Format,
) -> CommandOutput {
    let run = || -> Result<String, CliError> {
        let corpus = Corpus::load(evidence_dir)?;
        let mut out = String::new();
        if format == Format::Rows {
            out.push_str("match_id,source,rank,score,weight\n");
        }
        match mode {
            Mode::PerExpert => {
                for (expert, p) in corpus.predict_per_expert(match_id)? {
                    render_ranking(&mut out, match_id, &expert, &p, format);
                }
            }
            Mode::Combined => {
                let p = corpus.predict_combined(match_id)?;
                render_ranking(&mut out, match_id, "combined", &p, format);
            }
        }
        Ok(out)
    };
    match run() {
        Ok(stdout) => CommandOutput {
            stdout,
            stderr: String::new(),
            code: ExitCode::Success,
        },
        Err(e) => failure(e),
    }
}

/// The three evaluation tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub evidence_based: EvaluationReport,
    pub intuitive: Option<EvaluationReport>,
    pub combined: EvaluationReport,
}

/// Builds d_e, d_i and d_c records for every fixture with a result and
/// evidence. Warnings go to `warnings`.
pub fn evaluate(
    evidence_dir: &Path,
    fixtures: &Path,
    registry: &SchemaRegistry,
    warnings: &mut Vec<String>,
) -> Result<Evaluation, CliError> {
    let corpus = Corpus::load(evidence_dir)?;
    let fixtures = read_fixtures(fixtures)?;

    let mut de = Vec::new();
    let mut di = Vec::new();
    let mut dc = Vec::new();
    let mut experts: Option<(String, Vec<String>)> = None;
    for fx in &fixtures {
        let Some(actual) = fx.actual else {
            warnings.push(format!("match {}: no actual result, skipped", fx.match_id));
            continue;
        };
        let Some(subs) = corpus.submissions(&fx.match_id) else {
            warnings.push(format!("match {}: no evidence, skipped", fx.match_id));
            continue;
        };
        let ids: Vec<String> = subs.keys().cloned().collect();
        match &experts {
            None => experts = Some((fx.match_id.clone(), ids)),
            Some((first, expected)) if *expected != ids => {
                return Err(CliError::Validation(format!(
                    "match {} has experts {:?} but match {} has {:?}; every expert must cover every evaluated match",
                    fx.match_id, ids, first, expected
                )));
            }
            Some(_) => {}
        }

        let per_expert = corpus.predict_per_expert(&fx.match_id)?;
        let combined = corpus.predict_combined(&fx.match_id)?;
        let record = |predictions: BTreeMap<String, Score>| MatchRecord {
            match_id: fx.match_id.clone(),
            actual: Some(actual),
            predictions,
        };
        de.push(record(
            per_expert
                .iter()
                .map(|(e, p)| (e.clone(), top_score(p)))
                .collect(),
        ));
        di.push(record(
            subs.values()
                .filter_map(|s| s.intuitive.map(|i| (s.expert_id.clone(), i)))
                .collect(),
        ));
        dc.push(record(
            [("combined".to_string(), top_score(&combined))]
                .into_iter()
                .collect(),
        ));
    }

    let any_intuitive = di.iter().any(|r| !r.predictions.is_empty());
    let to_cli = |e: Error| CliError::Validation(e.to_string());
    let intuitive = if any_intuitive {
        Some(aggregate_with(&di, registry).map_err(to_cli)?)
    } else {
        if !di.is_empty() {
            warnings.push(
                "no intuitive predictions in the evidence; intuitive table omitted".to_string(),
            );
        }
        None
    };
    Ok(Evaluation {
        evidence_based: aggregate_with(&de, registry).map_err(to_cli)?,
        intuitive,
        combined: aggregate_with(&dc, registry).map_err(to_cli)?,
    })
}

fn ratio_header(registry: &SchemaRegistry, name: &str) -> String {
    let per_match = registry.get(name).map_or(1, |s| s.max_points());
    if per_match == 1 {
        format!("{name}/n")
    } else {
        format!("{name}/{per_match}n")
    }
}

/// Renders one report as an aligned table. Column maxima across several
/// sources are marked with `*`.
pub fn render_report_table(
    title: &str,
    report: &EvaluationReport,
    registry: &SchemaRegistry,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title} (n = {})", report.n);
    if report.sources.is_empty() {
        let _ = writeln!(out, "  (no evaluated matches)\n");
        return out;
    }
    let mut header = vec!["source".to_string(), "results".into(), "outcomes".into()];
    for name in &report.schemata {
        header.push(format!("Σ{name}"));
        header.push(ratio_header(registry, name));
    }

    let multi = report.sources.len() > 1;
    let max = report.max().filter(|_| multi);
    let mark = |value: f64, best: Option<f64>| if best == Some(value) { "*" } else { "" };

    let mut rows: Vec<Vec<String>> = Vec::new();
    for t in &report.sources {
        let mut row = vec![
            t.source.clone(),
            format!(
                "{}{}",
                t.correct_results,
                mark(
                    t.correct_results as f64,
                    max.as_ref().map(|m| m.correct_results)
                )
            ),
            format!(
                "{}{}",
                t.correct_outcomes,
                mark(
                    t.correct_outcomes as f64,
                    max.as_ref().map(|m| m.correct_outcomes)
                )
            ),
        ];
        for (i, s) in t.schemata.iter().enumerate() {
            let best = max.as_ref().map(|m| m.schemata[i]);
            row.push(format!(
                "{}{}",
                s.points,
                mark(s.points as f64, best.map(|b| b.0))
            ));
            row.push(format!(
                "{}{}",
                fmt3(s.ratio()),
                mark(s.ratio(), best.map(|b| b.1))
            ));
        }
        rows.push(row);
    }
    if multi {
        let mean = report.mean().expect("non-empty report");
        let mut row = vec![
            "mean".to_string(),
            format!("{:.2}", mean.correct_results),
            format!("{:.2}", mean.correct_outcomes),
        ];
        for (points, ratio) in &mean.schemata {
            row.push(format!("{points:.2}"));
            row.push(fmt3(*ratio));
        }
        rows.push(row);
    }

    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain(std::iter::once(header[c].chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                let pad = widths[c] - cell.chars().count();
                if c == 0 {
                    format!("{cell}{}", " ".repeat(pad))
                } else {
                    format!("{}{cell}", " ".repeat(pad))
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let _ = writeln!(out, "{}", line(&header));
    for r in &rows {
        let _ = writeln!(out, "{}", line(r));
    }
    out.push('\n');
    out
}

/// Renders a report as CSV rows, ratios at full precision.
pub fn render_report_rows(table: &str, report: &EvaluationReport, out: &mut String) {
    for t in &report.sources {
        let _ = write!(
            out,
            "{table},{},{},{},{}",
            t.source, report.n, t.correct_results, t.correct_outcomes
        );
        for s in &t.schemata {
            let _ = write!(out, ",{},{}", s.points, s.ratio());
        }
        out.push('\n');
    }
    if report.sources.len() > 1 {
        let mean = report.mean().expect("non-empty report");
        let _ = write!(
            out,
            "{table},mean,{},{},{}",
            report.n, mean.correct_results, mean.correct_outcomes
        );
        for (p, r) in &mean.schemata {
            let _ = write!(out, ",{p},{r}");
        }
        out.push('\n');
    }
}

pub fn cmd_evaluate(
    evidence_dir: &Path,
    fixtures: &Path,
    format: Format,
    schemata: Option<&[String]>,
) -> CommandOutput {
    let standard = SchemaRegistry::standard();
    let registry = match schemata {
        None => standard,
        Some(names) => match standard.select(names.iter().map(String::as_str)) {
            Ok(r) => r,
            Err(e) => return failure(CliError::Validation(e.to_string())),
        },
    };
    let mut warnings = Vec::new();
    let eval = match evaluate(evidence_dir, fixtures, &registry, &mut warnings) {
        Ok(e) => e,
        Err(e) => {
            let mut out = failure(e);
            out.stderr = warnings
                .iter()
                .map(|w| format!("warning: {w}\n"))
                .collect::<String>()
                + &out.stderr;
            return out;
        }
    };
    let mut stderr: String = warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    if eval.combined.n == 0 {
        stderr.push_str("notice: no matches with both a result and evidence; nothing evaluated\n");
    }

    let mut out = String::new();
    match format {
        Format::Table => {
            out.push_str(&render_report_table(
                "Individual evidence-based predictions (d_e)",
                &eval.evidence_based,
                &registry,
            ));
            if let Some(di) = &eval.intuitive {
                out.push_str(&render_report_table(
                    "Individual intuitive predictions (d_i)",
                    di,
                    &registry,
                ));
            }
            out.push_str(&render_report_table(
                "Combined evidence-based predictions (d_c)",
                &eval.combined,
                &registry,
            ));
        }
        Format::Rows => {
            out.push_str("table,source,n,correct_results,correct_outcomes");
            for name in registry.names() {
                let _ = write!(
                    out,
                    ",sum_{name},ratio_{name}",
                    name = name.replace('_', "")
                );
            }
            out.push('\n');
            render_report_rows("d_e", &eval.evidence_based, &mut out);
            if let Some(di) = &eval.intuitive {
                render_report_rows("d_i", di, &mut out);
            }
            render_report_rows("d_c", &eval.combined, &mut out);
        }
    }
    CommandOutput {
        stdout: out,
        stderr,
        code: ExitCode::Success,
    }
}
