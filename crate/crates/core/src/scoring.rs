//! Scores programs against a solved [`ReputationModel`].
//!
//! A program's raw score is the reputation-weighted sum of its publication
//! counts over the reference venues. The R-Score divides it by the largest
//! raw score among the programs being ranked together.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::corpus::ProgramId;
use crate::counts::CountsTable;
use crate::error::{Error, Result};
use crate::reputation::ReputationModel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub program_id: ProgramId,
    pub faculty_count: usize,
    pub raw_score: f64,
    pub r_score: f64,
    pub r_score_per_faculty: f64,
    pub rank_total: usize,
    pub rank_per_faculty: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub rows: Vec<ScoreRow>,
    pub model_digest: String,
    /// Set when every raw score is zero; all R-Scores are then zero too.
    pub all_zero: bool,
}

impl ScoreReport {
    pub fn row(&self, program: &str) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.program_id.as_str() == program)
    }

    /// Program ids in report order.
    pub fn ranking(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.program_id.as_str()).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "program_id\tfaculty_count\traw_score\tr_score\tr_score_per_faculty\trank_total\trank_per_faculty\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}",
                r.program_id,
                r.faculty_count,
                r.raw_score,
                r.r_score,
                r.r_score_per_faculty,
                r.rank_total,
                r.rank_per_faculty
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value["warning"] = if self.all_zero {
            "all programs scored zero".into()
        } else {
            serde_json::Value::Null
        };
        value
    }
}

/// Σ_j ν_j · N(x, v_j) over the reference venues. Publications outside them
/// never reach the counts table, so they contribute nothing.
pub fn raw_score(model: &ReputationModel, counts: &CountsTable, program: &str) -> Result<f64> {
    counts.roster_size(program)?;
    model
        .venue_index()
        .iter()
        .zip(&model.nu)
        .map(|(venue, nu)| {
            let n = counts.program_venue(program, venue.as_str())?;
            Ok(nu * n.to_f64().expect("finite count"))
        })
        .sum()
}

/// 1-based competition ranks: ties share the smaller rank and the next
/// rank skips (1, 2, 2, 4).
pub fn competition_ranks(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|v| 1 + values.iter().filter(|other| *other > v).count())
        .collect()
}

fn normalize(values: &[f64]) -> (Vec<f64>, bool) {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        (values.iter().map(|v| v / max).collect(), false)
    } else {
        (vec![0.0; values.len()], true)
    }
}

/// Scores and ranks `programs` together; normalization runs over exactly
/// this list. Rows come out by descending score, ties by program id.
pub fn score_programs<S: AsRef<str>>(
    model: &ReputationModel,
    counts: &CountsTable,
    programs: &[S],
) -> Result<ScoreReport> {
    if programs.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut seen = HashSet::new();
    let mut raw = Vec::with_capacity(programs.len());
    let mut ids = Vec::with_capacity(programs.len());
    let mut faculty = Vec::with_capacity(programs.len());
    for program in programs {
        let program = program.as_ref();
        if !seen.insert(program) {
            return Err(Error::DuplicateProgram(program.to_string()));
        }
        raw.push(raw_score(model, counts, program)?);
        faculty.push(counts.roster_size(program)?);
        ids.push(ProgramId::new(program)?);
    }

    let (r_scores, all_zero) = normalize(&raw);
    let ranks = competition_ranks(&raw);
    let mut rows: Vec<ScoreRow> = ids
        .into_iter()
        .enumerate()
        .map(|(i, program_id)| ScoreRow {
            program_id,
            faculty_count: faculty[i],
            raw_score: raw[i],
            r_score: r_scores[i],
            r_score_per_faculty: 0.0,
            rank_total: ranks[i],
            rank_per_faculty: 0,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.raw_score
            .total_cmp(&a.raw_score)
            .then_with(|| a.program_id.cmp(&b.program_id))
    });

    Ok(per_faculty_view(ScoreReport {
        rows,
        model_digest: model.digest(),
        all_zero,
    }))
}

/// Recomputes the size-adjusted columns: raw score over roster size,
/// renormalized to a maximum of one.
pub fn per_faculty_view(mut report: ScoreReport) -> ScoreReport {
    let per_head: Vec<f64> = report
        .rows
        .iter()
        .map(|r| r.raw_score / r.faculty_count as f64)
        .collect();
    let (normalized, _) = normalize(&per_head);
    let ranks = competition_ranks(&per_head);
    for (row, (score, rank)) in report.rows.iter_mut().zip(normalized.into_iter().zip(ranks)) {
        row.r_score_per_faculty = score;
        row.rank_per_faculty = rank;
    }
    report
}
