//! Co-author weighted publication counts.
//!
//! A paper with `a` authors on the roster of program ω counts `1/a` toward
//! each of them, so the per-program count of a venue is the number of
//! distinct papers the program placed there. All counts are exact
//! rationals; the conversion to `f64` happens when the reputation matrices
//! are built.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::corpus::{reference_venue_set, AuthorId, Corpus, ProgramId, VenueId};
use crate::error::{Error, Result};

/// How the venue totals N(v) are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VenueMode {
    /// Sum of the per-program counts; a paper shared by two reference
    /// programs counts once for each.
    #[default]
    PerProgram,
    /// Each paper with a reference author counts once.
    DistinctPaper,
}

impl std::str::FromStr for VenueMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "per-program" => Ok(Self::PerProgram),
            "distinct" | "distinct-paper" => Ok(Self::DistinctPaper),
            other => Err(format!("unknown venue mode {other:?}")),
        }
    }
}

/// All N(·) values over the reference venues.
#[derive(Debug, Clone, PartialEq)]
pub struct CountsTable {
    venue_mode: VenueMode,
    venues: Vec<VenueId>,
    reference: Vec<ProgramId>,
    candidates: Vec<ProgramId>,
    roster_sizes: BTreeMap<ProgramId, usize>,
    per_faculty_venue: BTreeMap<(ProgramId, AuthorId, VenueId), BigRational>,
    per_program_venue: BTreeMap<(ProgramId, VenueId), BigRational>,
    per_venue: BTreeMap<VenueId, BigRational>,
    per_program: BTreeMap<ProgramId, BigRational>,
}

impl CountsTable {
    pub fn venue_mode(&self) -> VenueMode {
        self.venue_mode
    }

    /// Reference venues in lexicographic order.
    pub fn venues(&self) -> &[VenueId] {
        &self.venues
    }

    /// Reference programs in priority order.
    pub fn reference_programs(&self) -> &[ProgramId] {
        &self.reference
    }

    pub fn candidate_programs(&self) -> &[ProgramId] {
        &self.candidates
    }

    pub fn roster_size(&self, program: &str) -> Result<usize> {
        self.roster_sizes
            .get(program)
            .copied()
            .ok_or_else(|| Error::UnknownProgram(program.to_string()))
    }

    fn check_program(&self, program: &str) -> Result<()> {
        self.roster_size(program).map(drop)
    }

    fn check_venue(&self, venue: &str) -> Result<()> {
        if self.per_venue.contains_key(venue) {
            Ok(())
        } else {
            Err(Error::UnknownVenue(venue.to_string()))
        }
    }

    /// N(f, v) for a faculty member of `program`.
    pub fn faculty_venue(&self, program: &str, faculty: &str, venue: &str) -> Result<BigRational> {
        self.check_program(program)?;
        self.check_venue(venue)?;
        let key = (ProgramId::new(program)?, AuthorId::new(faculty)?, VenueId::new(venue)?);
        Ok(self
            .per_faculty_venue
            .get(&key)
            .cloned()
            .unwrap_or_else(BigRational::zero))
    }

    /// N(ω, v) for any roster, reference or candidate.
    pub fn program_venue(&self, program: &str, venue: &str) -> Result<BigRational> {
        self.check_program(program)?;
        self.check_venue(venue)?;
        let key = (ProgramId::new(program)?, VenueId::new(venue)?);
        Ok(self
            .per_program_venue
            .get(&key)
            .cloned()
            .unwrap_or_else(BigRational::zero))
    }

    /// N(v), counted over the reference programs only.
    pub fn venue_total(&self, venue: &str) -> Result<BigRational> {
        self.per_venue
            .get(venue)
            .cloned()
            .ok_or_else(|| Error::UnknownVenue(venue.to_string()))
    }

    /// N(ω): the program's count summed over the reference venues.
    pub fn program_total(&self, program: &str) -> Result<BigRational> {
        self.per_program
            .get(program)
            .cloned()
            .ok_or_else(|| Error::UnknownProgram(program.to_string()))
    }

    pub fn per_faculty_venue(&self) -> &BTreeMap<(ProgramId, AuthorId, VenueId), BigRational> {
        &self.per_faculty_venue
    }

    pub fn per_program_venue(&self) -> &BTreeMap<(ProgramId, VenueId), BigRational> {
        &self.per_program_venue
    }

    /// Tab-separated dump: one `#` section header per map, then rows with
    /// a six-digit decimal and the exact `p/q` value.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let mode = match self.venue_mode {
            VenueMode::PerProgram => "per-program",
            VenueMode::DistinctPaper => "distinct-paper",
        };
        let _ = writeln!(out, "# venue_mode\t{mode}");
        let _ = writeln!(out, "# per_faculty_venue\nprogram\tfaculty\tvenue\tcount\texact");
        for ((p, f, v), n) in &self.per_faculty_venue {
            let _ = writeln!(out, "{p}\t{f}\t{v}\t{}\t{}", decimal(n, 6), exact(n));
        }
        let _ = writeln!(out, "# per_program_venue\nprogram\tvenue\tcount\texact");
        for ((p, v), n) in &self.per_program_venue {
            let _ = writeln!(out, "{p}\t{v}\t{}\t{}", decimal(n, 6), exact(n));
        }
        let _ = writeln!(out, "# per_venue\nvenue\tcount\texact");
        for (v, n) in &self.per_venue {
            let _ = writeln!(out, "{v}\t{}\t{}", decimal(n, 6), exact(n));
        }
        let _ = writeln!(out, "# per_program\nprogram\tcount\texact");
        for (p, n) in &self.per_program {
            let _ = writeln!(out, "{p}\t{}\t{}", decimal(n, 6), exact(n));
        }
        out
    }

    /// JSON form of [`Self::to_tsv`], values as exact `p/q` strings.
    pub fn to_json(&self) -> serde_json::Value {
        let faculty: Vec<_> = self
            .per_faculty_venue
            .iter()
            .map(|((p, f, v), n)| serde_json::json!({"program": p, "faculty": f, "venue": v, "count": exact(n)}))
            .collect();
        let program_venue: Vec<_> = self
            .per_program_venue
            .iter()
            .map(|((p, v), n)| serde_json::json!({"program": p, "venue": v, "count": exact(n)}))
            .collect();
        let venue: BTreeMap<_, _> = self.per_venue.iter().map(|(v, n)| (v.as_str(), exact(n))).collect();
        let program: BTreeMap<_, _> = self.per_program.iter().map(|(p, n)| (p.as_str(), exact(n))).collect();
        serde_json::json!({
            "venue_mode": self.venue_mode,
            "per_faculty_venue": faculty,
            "per_program_venue": program_venue,
            "per_venue": venue,
            "per_program": program,
        })
    }
}

/// Rounds a non-negative rational to `digits` fractional digits, half up.
pub fn decimal(value: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = value * BigRational::from_integer(scale.clone());
    let negative = scaled.is_negative();
    let magnitude = scaled.abs();
    let (whole, rem) = magnitude.numer().div_rem(magnitude.denom());
    let mut units = whole;
    if rem * 2 >= *magnitude.denom() {
        units += 1;
    }
    let (int_part, frac_part) = units.div_rem(&scale);
    let sign = if negative && !(int_part.is_zero() && frac_part.is_zero()) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{frac_part:0>width$}", width = digits as usize)
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn exact(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn unit_fraction(denominator: usize) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(denominator))
}

fn roster_of<'c>(corpus: &'c Corpus, program: &str) -> Result<&'c crate::corpus::ProgramRoster> {
    corpus
        .program(program)
        .ok_or_else(|| Error::UnknownProgram(program.to_string()))
}

fn require_reference_venue(corpus: &Corpus, venue: &str) -> Result<()> {
    if reference_venue_set(corpus)?.iter().any(|v| v.as_str() == venue) {
        Ok(())
    } else {
        Err(Error::UnknownVenue(venue.to_string()))
    }
}

/// N(f, v): the faculty member's papers in `venue`, each weighted by one
/// over the number of `program` roster members among its authors.
pub fn weighted_faculty_count(
    corpus: &Corpus,
    program: &str,
    faculty: &str,
    venue: &str,
) -> Result<BigRational> {
    let roster = roster_of(corpus, program)?;
    if !roster.contains(faculty) {
        return Err(Error::NotInRoster {
            program: program.to_string(),
            author: faculty.to_string(),
        });
    }
    require_reference_venue(corpus, venue)?;
    let mut total = BigRational::zero();
    for paper in corpus.publications() {
        if paper.venue.as_str() != venue || !paper.authors.iter().any(|a| a.as_str() == faculty) {
            continue;
        }
        let same_program = paper
            .authors
            .iter()
            .filter(|a| roster.contains(a.as_str()))
            .count();
        total += unit_fraction(same_program);
    }
    Ok(total)
}

/// N(ω, v): sum of the roster's weighted faculty counts in `venue`.
pub fn program_venue_count(corpus: &Corpus, program: &str, venue: &str) -> Result<BigRational> {
    let roster = roster_of(corpus, program)?;
    require_reference_venue(corpus, venue)?;
    roster
        .faculty
        .iter()
        .map(|f| weighted_faculty_count(corpus, program, f.as_str(), venue))
        .sum()
}

pub fn venue_total(counts: &CountsTable, venue: &str) -> Result<BigRational> {
    counts.venue_total(venue)
}

pub fn program_total(counts: &CountsTable, program: &str) -> Result<BigRational> {
    counts.program_total(program)
}

/// Builds every count in a single pass over the publications.
pub fn build_counts(corpus: &Corpus, venue_mode: VenueMode) -> Result<CountsTable> {
    let venues = reference_venue_set(corpus)?;
    let venue_lookup: BTreeSet<&str> = venues.iter().map(VenueId::as_str).collect();
    let programs: Vec<_> = corpus.programs().collect();
    let reference_len = corpus.reference_programs().len();
    let affiliation = corpus.affiliations();

    let mut per_faculty_venue = BTreeMap::new();
    let mut per_program_venue: BTreeMap<(ProgramId, VenueId), BigRational> = BTreeMap::new();
    let mut distinct_per_venue: BTreeMap<VenueId, usize> = BTreeMap::new();

    for paper in corpus.publications() {
        if !venue_lookup.contains(paper.venue.as_str()) {
            continue;
        }
        let mut by_program: BTreeMap<usize, Vec<&AuthorId>> = BTreeMap::new();
        for author in &paper.authors {
            if let Some(&idx) = affiliation.get(author.as_str()) {
                by_program.entry(idx).or_default().push(author);
            }
        }
        if by_program.keys().any(|&idx| idx < reference_len) {
            *distinct_per_venue.entry(paper.venue.clone()).or_default() += 1;
        }
        for (idx, authors) in by_program {
            let program = &programs[idx].id;
            let share = unit_fraction(authors.len());
            for author in authors {
                *per_faculty_venue
                    .entry((program.clone(), author.clone(), paper.venue.clone()))
                    .or_insert_with(BigRational::zero) += &share;
            }
            *per_program_venue
                .entry((program.clone(), paper.venue.clone()))
                .or_insert_with(BigRational::zero) += BigRational::from_integer(BigInt::from(1));
        }
    }

    let reference: Vec<ProgramId> = corpus
        .reference_programs()
        .iter()
        .map(|r| r.id.clone())
        .collect();
    let reference_set: HashSet<&ProgramId> = reference.iter().collect();

    let mut per_venue: BTreeMap<VenueId, BigRational> = venues
        .iter()
        .map(|v| (v.clone(), BigRational::zero()))
        .collect();
    match venue_mode {
        VenueMode::PerProgram => {
            for ((program, venue), n) in &per_program_venue {
                if reference_set.contains(program) {
                    *per_venue.get_mut(venue).expect("reference venue") += n;
                }
            }
        }
        VenueMode::DistinctPaper => {
            for (venue, n) in distinct_per_venue {
                per_venue.insert(venue, BigRational::from_integer(BigInt::from(n)));
            }
        }
    }

    let mut per_program: BTreeMap<ProgramId, BigRational> = programs
        .iter()
        .map(|p| (p.id.clone(), BigRational::zero()))
        .collect();
    for ((program, _), n) in &per_program_venue {
        *per_program.get_mut(program).expect("known program") += n;
    }

    Ok(CountsTable {
        venue_mode,
        venues,
        reference,
        candidates: corpus
            .candidate_programs()
            .iter()
            .map(|r| r.id.clone())
            .collect(),
        roster_sizes: programs
            .iter()
            .map(|p| (p.id.clone(), p.faculty.len()))
            .collect(),
        per_faculty_venue,
        per_program_venue,
        per_venue,
        per_program,
    })
}
