//! Rank correlation, reference-set stability sweeps and side-by-side
//! comparison against an external grading.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{Corpus, ProgramId};
use crate::counts::{build_counts, VenueMode};
use crate::error::{Error, Result};
use crate::reputation::build_reputation_model;
use crate::scoring::{score_programs, ScoreReport};

/// Ranks with ties replaced by the mean of the positions they span.
/// Larger values get smaller ranks (rank 1 is the best).
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let shared = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = shared;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Tie-aware Spearman coefficient of two paired score vectors: the Pearson
/// correlation of their average ranks.
pub fn spearman_scores(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MismatchedRankings);
    }
    if a.len() < 2 {
        return Err(Error::TooFewItems(a.len()));
    }
    let (ranks_a, ranks_b) = (average_ranks(a), average_ranks(b));
    if has_ties(&ranks_a) || has_ties(&ranks_b) {
        return pearson(&ranks_a, &ranks_b);
    }
    // tie-free ranks are integers, so the classic formula is exact
    let n = a.len() as f64;
    let d2: f64 = ranks_a.iter().zip(&ranks_b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(1.0 - 6.0 * d2 / (n * (n * n - 1.0)))
}

fn has_ties(ranks: &[f64]) -> bool {
    ranks.iter().any(|r| r.fract() != 0.0) || {
        let mut seen = HashSet::new();
        ranks.iter().any(|r| !seen.insert(r.to_bits()))
    }
}

/// Spearman coefficient of two orderings of the same programs (best
/// first). Orderings carry no ties.
pub fn spearman<S: AsRef<str>>(rank_a: &[S], rank_b: &[S]) -> Result<f64> {
    if rank_a.len() != rank_b.len() {
        return Err(Error::MismatchedRankings);
    }
    if rank_a.len() < 2 {
        return Err(Error::TooFewItems(rank_a.len()));
    }
    let position_b: HashMap<&str, usize> = rank_b
        .iter()
        .enumerate()
        .map(|(pos, id)| (id.as_ref(), pos))
        .collect();
    let distinct_a: HashSet<&str> = rank_a.iter().map(AsRef::as_ref).collect();
    if position_b.len() != rank_b.len() || distinct_a.len() != rank_a.len() {
        return Err(Error::MismatchedRankings);
    }
    let mut x = Vec::with_capacity(rank_a.len());
    let mut y = Vec::with_capacity(rank_a.len());
    for (pos, id) in rank_a.iter().enumerate() {
        let other = *position_b.get(id.as_ref()).ok_or(Error::MismatchedRankings)?;
        // negated positions: earlier is better, as with scores
        x.push(-(pos as f64));
        y.push(-(other as f64));
    }
    spearman_scores(&x, &y)
}

/// Spearman over two score-annotated rankings, paired by program id.
pub fn spearman_scored<S: AsRef<str>>(a: &[(S, f64)], b: &[(S, f64)]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MismatchedRankings);
    }
    let lookup: HashMap<&str, f64> = b.iter().map(|(id, s)| (id.as_ref(), *s)).collect();
    if lookup.len() != b.len() {
        return Err(Error::MismatchedRankings);
    }
    let mut x = Vec::with_capacity(a.len());
    let mut y = Vec::with_capacity(a.len());
    for (id, score) in a {
        x.push(*score);
        y.push(*lookup.get(id.as_ref()).ok_or(Error::MismatchedRankings)?);
    }
    spearman_scores(&x, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub from: usize,
    pub to: usize,
    pub rho: f64,
}

impl Comparison {
    pub fn label(&self) -> String {
        format!("R_Top({}) versus R_Top({})", self.from, self.to)
    }

    pub fn agreement_pct(&self) -> f64 {
        100.0 * self.rho
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub sizes: Vec<usize>,
    pub adjacent: Vec<Comparison>,
    pub first_vs_last: Comparison,
    /// Candidate ordering produced with each reference-set size.
    pub rankings: BTreeMap<usize, Vec<ProgramId>>,
    /// Raw scores behind each ranking, in ranking order.
    pub scores: BTreeMap<usize, Vec<(ProgramId, f64)>>,
}

impl StabilityReport {
    /// Adjacent comparisons followed by first-versus-last.
    pub fn comparisons(&self) -> impl Iterator<Item = &Comparison> {
        self.adjacent.iter().chain(std::iter::once(&self.first_vs_last))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("comparison\trho\tagreement_pct\n");
        for c in self.comparisons() {
            let _ = writeln!(out, "{}\t{:.6}\t{:.2}%", c.label(), c.rho, c.agreement_pct());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let comparisons: Vec<_> = self
            .comparisons()
            .map(|c| {
                serde_json::json!({
                    "comparison": c.label(),
                    "from": c.from,
                    "to": c.to,
                    "rho": c.rho,
                    "agreement_pct": c.agreement_pct(),
                })
            })
            .collect();
        serde_json::json!({
            "sizes": self.sizes,
            "comparisons": comparisons,
            "rankings": self.rankings,
        })
    }
}

fn scored_ranking(report: &ScoreReport) -> Vec<(ProgramId, f64)> {
    report
        .rows
        .iter()
        .map(|r| (r.program_id.clone(), r.raw_score))
        .collect()
}

/// Ranks the candidates once per reference-set prefix `Top(1) .. Top(k)` and
/// correlates consecutive rankings, plus the first against the last.
pub fn stability_sweep(corpus: &Corpus, k: usize, venue_mode: VenueMode) -> Result<StabilityReport> {
    if k == 0 {
        return Err(Error::InvalidSweepSize);
    }
    let found = corpus.reference_programs().len();
    if found < k {
        return Err(Error::NotEnoughReferences { needed: k, found });
    }
    let candidates: Vec<&str> = corpus
        .candidate_programs()
        .iter()
        .map(|r| r.id.as_str())
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }

    let wrap = |size: usize| move |e: Error| Error::Sweep { size, source: Box::new(e) };
    let mut rankings = BTreeMap::new();
    let mut scores = BTreeMap::new();
    for size in 1..=k {
        let prefix = corpus.with_reference_prefix(size).map_err(wrap(size))?;
        let counts = build_counts(&prefix, venue_mode).map_err(wrap(size))?;
        let model = build_reputation_model(&counts).map_err(wrap(size))?;
        let report = score_programs(&model, &counts, &candidates).map_err(wrap(size))?;
        log::info!("ranked {} candidates with Top({size})", report.rows.len());
        rankings.insert(
            size,
            report.rows.iter().map(|r| r.program_id.clone()).collect(),
        );
        scores.insert(size, scored_ranking(&report));
    }

    let compare = |from: usize, to: usize| -> Result<Comparison> {
        let rho = spearman_scored(&scores[&from], &scores[&to]).map_err(wrap(to))?;
        Ok(Comparison { from, to, rho })
    };
    let adjacent = (1..k).map(|i| compare(i, i + 1)).collect::<Result<Vec<_>>>()?;
    let first_vs_last = if k == 1 {
        Comparison {
            from: 1,
            to: 1,
            rho: 1.0,
        }
    } else {
        compare(1, k)?
    };

    Ok(StabilityReport {
        sizes: (1..=k).collect(),
        adjacent,
        first_vs_last,
        rankings,
        scores,
    })
}

/// Spearman result that may be undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correlation {
    Value(f64),
    Degenerate,
}

impl std::fmt::Display for Correlation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Correlation::Value(rho) => write!(f, "{rho:.6}"),
            Correlation::Degenerate => f.write_str("degenerate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub program_id: ProgramId,
    pub r_score: f64,
    pub rank_total: usize,
    pub grade: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingComparison {
    pub rows: Vec<ComparisonRow>,
    pub rho: Correlation,
}

impl RankingComparison {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("program_id\tr_score\trank_total\tgrade\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{:.6}\t{}\t{}", r.program_id, r.r_score, r.rank_total, r.grade);
        }
        let _ = writeln!(out, "# spearman\t{}", self.rho);
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rho = match self.rho {
            Correlation::Value(v) => serde_json::json!(v),
            Correlation::Degenerate => serde_json::json!("degenerate"),
        };
        serde_json::json!({"rows": self.rows, "spearman": rho})
    }
}

/// Reads `program_id<TAB>grade` lines, best first. Blank lines are skipped.
pub fn parse_grades(text: &str) -> Result<Vec<(String, String)>> {
    let mut grades = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: &str| Error::MalformedGrades {
            line: idx + 1,
            message: message.to_string(),
        };
        let (program, grade) = line
            .split_once('\t')
            .ok_or_else(|| malformed("expected program_id<TAB>grade"))?;
        let (program, grade) = (program.trim(), grade.trim());
        if program.is_empty() || grade.is_empty() || grade.contains('\t') {
            return Err(malformed("expected program_id<TAB>grade"));
        }
        if !seen.insert(program.to_string()) {
            return Err(malformed("program listed twice"));
        }
        grades.push((program.to_string(), grade.to_string()));
    }
    Ok(grades)
}

/// Pairs a score report with an external grading given best first. Equal
/// grade labels form one tie group; groups are ordered by first appearance.
pub fn compare_rankings(report: &ScoreReport, external: &[(String, String)]) -> Result<RankingComparison> {
    let mut level: HashMap<&str, usize> = HashMap::new();
    let mut grade_of: HashMap<&str, &str> = HashMap::new();
    for (program, grade) in external {
        let next = level.len();
        level.entry(grade.as_str()).or_insert(next);
        grade_of.insert(program.as_str(), grade.as_str());
    }

    let rows: Vec<ComparisonRow> = report
        .rows
        .iter()
        .filter_map(|r| {
            grade_of.get(r.program_id.as_str()).map(|grade| ComparisonRow {
                program_id: r.program_id.clone(),
                r_score: r.r_score,
                rank_total: r.rank_total,
                grade: grade.to_string(),
            })
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyIntersection);
    }

    let ours: Vec<f64> = rows.iter().map(|r| r.r_score).collect();
    let theirs: Vec<f64> = rows
        .iter()
        .map(|r| -(level[r.grade.as_str()] as f64))
        .collect();
    let rho = match spearman_scores(&ours, &theirs) {
        Ok(rho) => Correlation::Value(rho),
        Err(Error::Degenerate | Error::TooFewItems(_)) => Correlation::Degenerate,
        Err(e) => return Err(e),
    };
    Ok(RankingComparison { rows, rho })
}
