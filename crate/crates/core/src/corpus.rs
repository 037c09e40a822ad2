//! Input data model: publication records, program rosters and the validated
//! [`Corpus`] that every later stage reads from.
//!
//! Two text formats are accepted. Publications arrive one JSON object per
//! line:
//!
//! ```text
//! {"id": "p01", "venue": "v1", "year": 2010, "authors": ["f11", "f21"]}
//! ```
//!
//! Rosters arrive as a single JSON document:
//!
//! ```text
//! {"programs": [
//!   {"id": "mit", "role": "reference", "rank_hint": 1, "faculty": ["f11"]},
//!   {"id": "ufmg", "role": "candidate", "faculty": ["g1", "g2"]}
//! ]}
//! ```
//!
//! Unknown keys are rejected in both formats.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! text_id {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            /// Trims surrounding whitespace and rejects empty identifiers.
            pub fn new(value: impl AsRef<str>) -> Result<Self> {
                let trimmed = value.as_ref().trim();
                if trimmed.is_empty() {
                    return Err(Error::InvalidId(concat!("empty ", $what).to_string()));
                }
                Ok(Self(trimmed.to_string()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;

            fn try_from(value: String) -> Result<Self> {
                Self::new(value)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

text_id!(
    /// A resolved author identifier. Compared byte for byte.
    AuthorId,
    "author id"
);
text_id!(
    /// An opaque venue identifier (journal or conference).
    VenueId,
    "venue id"
);
text_id!(ProgramId, "program id");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicationRecord {
    pub id: String,
    pub venue: VenueId,
    pub year: i32,
    pub authors: Vec<AuthorId>,
}

impl PublicationRecord {
    fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::InvalidId("empty publication id".into()));
        }
        if self.authors.is_empty() {
            return Err(Error::EmptyAuthorList {
                id: self.id.clone(),
            });
        }
        let mut seen = HashSet::with_capacity(self.authors.len());
        for author in &self.authors {
            if !seen.insert(author) {
                return Err(Error::DuplicateAuthor {
                    id: self.id.clone(),
                    author: author.to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Reference,
    Candidate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramRoster {
    pub id: ProgramId,
    pub role: Role,
    pub faculty: Vec<AuthorId>,
}

impl ProgramRoster {
    pub fn new(id: ProgramId, role: Role, faculty: Vec<AuthorId>) -> Self {
        Self { id, role, faculty }
    }

    pub fn contains(&self, author: &str) -> bool {
        self.faculty.iter().any(|f| f.as_str() == author)
    }
}

/// Closed year interval. Either bound may be open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct YearWindow {
    pub from: Option<i32>,
    pub to: Option<i32>,
}

impl YearWindow {
    pub fn new(from: Option<i32>, to: Option<i32>) -> Result<Self> {
        if let (Some(from), Some(to)) = (from, to) {
            if from > to {
                return Err(Error::InvalidWindow { from, to });
            }
        }
        Ok(Self { from, to })
    }

    pub fn contains(&self, year: i32) -> bool {
        self.from.is_none_or(|from| year >= from) && self.to.is_none_or(|to| year <= to)
    }

    pub fn is_unbounded(&self) -> bool {
        self.from.is_none() && self.to.is_none()
    }
}

/// A validated publication corpus together with its program rosters.
///
/// Construction enforces every structural invariant, so downstream code
/// never re-checks them.
#[derive(Debug, Clone)]
pub struct Corpus {
    publications: Vec<PublicationRecord>,
    reference: Vec<ProgramRoster>,
    candidates: Vec<ProgramRoster>,
    window: YearWindow,
    dropped: usize,
}

impl Corpus {
    /// Validates and assembles a corpus. `reference` order is the priority
    /// order used by stability sweeps. Publications outside `window` are
    /// dropped and counted.
    pub fn new(
        publications: Vec<PublicationRecord>,
        reference: Vec<ProgramRoster>,
        candidates: Vec<ProgramRoster>,
        window: YearWindow,
    ) -> Result<Self> {
        let mut ids = HashSet::new();
        for record in &publications {
            record.validate()?;
            if !ids.insert(record.id.as_str()) {
                return Err(Error::DuplicatePublication(record.id.clone()));
            }
        }

        validate_rosters(&reference, &candidates)?;

        let before = publications.len();
        let publications: Vec<_> = publications
            .into_iter()
            .filter(|p| window.contains(p.year))
            .collect();
        let dropped = before - publications.len();

        let corpus = Self {
            publications,
            reference,
            candidates,
            window,
            dropped,
        };
        reference_venue_set(&corpus)?;
        Ok(corpus)
    }

    pub fn publications(&self) -> &[PublicationRecord] {
        &self.publications
    }

    pub fn reference_programs(&self) -> &[ProgramRoster] {
        &self.reference
    }

    pub fn candidate_programs(&self) -> &[ProgramRoster] {
        &self.candidates
    }

    pub fn programs(&self) -> impl Iterator<Item = &ProgramRoster> {
        self.reference.iter().chain(&self.candidates)
    }

    pub fn program(&self, id: &str) -> Option<&ProgramRoster> {
        self.programs().find(|p| p.id.as_str() == id)
    }

    pub fn year_window(&self) -> YearWindow {
        self.window
    }

    /// Number of records removed by the year window at construction.
    pub fn dropped_outside_window(&self) -> usize {
        self.dropped
    }

    /// The same corpus restricted to the first `size` reference programs.
    pub fn with_reference_prefix(&self, size: usize) -> Result<Self> {
        if size == 0 || size > self.reference.len() {
            return Err(Error::NotEnoughReferences {
                needed: size.max(1),
                found: self.reference.len(),
            });
        }
        let corpus = Self {
            publications: self.publications.clone(),
            reference: self.reference[..size].to_vec(),
            candidates: self.candidates.clone(),
            window: self.window,
            dropped: self.dropped,
        };
        reference_venue_set(&corpus)?;
        Ok(corpus)
    }

    /// Map from author to the index of the program (reference programs
    /// first, then candidates) whose roster lists them.
    pub(crate) fn affiliations(&self) -> HashMap<&str, usize> {
        let mut map = HashMap::new();
        for (idx, roster) in self.programs().enumerate() {
            for author in &roster.faculty {
                map.insert(author.as_str(), idx);
            }
        }
        map
    }

    /// Publications file contents, one JSON object per line.
    pub fn publications_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.publications {
            out.push_str(&serde_json::to_string(record).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Rosters document. Reference programs carry their position as
    /// `rank_hint`, so parsing the output restores the same order.
    pub fn rosters_json(&self) -> String {
        let programs = self
            .reference
            .iter()
            .enumerate()
            .map(|(pos, r)| RosterEntry::from_roster(r, Some(pos as u32 + 1)))
            .chain(self.candidates.iter().map(|r| RosterEntry::from_roster(r, None)))
            .collect();
        serde_json::to_string_pretty(&RostersDocument { programs }).expect("rosters serialize")
    }
}

fn validate_rosters(reference: &[ProgramRoster], candidates: &[ProgramRoster]) -> Result<()> {
    let mut roles: HashMap<&str, Role> = HashMap::new();
    let mut owner: HashMap<&str, &str> = HashMap::new();
    for roster in reference.iter().chain(candidates) {
        if let Some(previous) = roles.insert(roster.id.as_str(), roster.role) {
            return Err(if previous != roster.role {
                Error::RosterOverlap(roster.id.to_string())
            } else {
                Error::DuplicateProgram(roster.id.to_string())
            });
        }
        if roster.faculty.is_empty() {
            return Err(Error::EmptyRoster(roster.id.to_string()));
        }
        let mut seen = HashSet::new();
        for author in &roster.faculty {
            if !seen.insert(author.as_str()) {
                return Err(Error::DuplicateFaculty {
                    program: roster.id.to_string(),
                    author: author.to_string(),
                });
            }
            if let Some(first) = owner.insert(author.as_str(), roster.id.as_str()) {
                return Err(Error::SharedFaculty {
                    author: author.to_string(),
                    first: first.to_string(),
                    second: roster.id.to_string(),
                });
            }
        }
    }
    if reference.iter().any(|r| r.role != Role::Reference)
        || candidates.iter().any(|r| r.role != Role::Candidate)
    {
        return Err(Error::MalformedRosters(
            "roster role does not match its list".into(),
        ));
    }
    Ok(())
}

/// The reference venues: every venue holding at least one publication with
/// an author from a reference roster, in lexicographic order.
pub fn reference_venue_set(corpus: &Corpus) -> Result<Vec<VenueId>> {
    let reference_faculty: HashSet<&str> = corpus
        .reference
        .iter()
        .flat_map(|r| r.faculty.iter().map(AuthorId::as_str))
        .collect();
    let venues: BTreeSet<&VenueId> = corpus
        .publications
        .iter()
        .filter(|p| p.authors.iter().any(|a| reference_faculty.contains(a.as_str())))
        .map(|p| &p.venue)
        .collect();
    if venues.is_empty() {
        return Err(Error::EmptyVenueSet);
    }
    Ok(venues.into_iter().cloned().collect())
}

/// Parses one-record-per-line publication text. Blank lines are skipped;
/// line numbers in errors are 1-based.
pub fn parse_publications(text: &str) -> Result<Vec<PublicationRecord>> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: PublicationRecord =
            serde_json::from_str(line).map_err(|e| Error::MalformedLine {
                line: idx + 1,
                message: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RostersDocument {
    programs: Vec<RosterEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RosterEntry {
    id: ProgramId,
    role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rank_hint: Option<u32>,
    faculty: Vec<AuthorId>,
}

impl RosterEntry {
    fn from_roster(roster: &ProgramRoster, rank_hint: Option<u32>) -> Self {
        Self {
            id: roster.id.clone(),
            role: roster.role,
            rank_hint,
            faculty: roster.faculty.clone(),
        }
    }
}

/// Parses the rosters document into (reference, candidate) lists. Hinted
/// reference programs come first by `rank_hint`, then unhinted ones in
/// file order.
pub fn parse_rosters(text: &str) -> Result<(Vec<ProgramRoster>, Vec<ProgramRoster>)> {
    let doc: RostersDocument =
        serde_json::from_str(text).map_err(|e| Error::MalformedRosters(e.to_string()))?;
    let mut hinted = Vec::new();
    let mut unhinted = Vec::new();
    let mut candidates = Vec::new();
    for entry in doc.programs {
        if entry.rank_hint == Some(0) {
            return Err(Error::MalformedRosters(format!(
                "program {:?}: rank_hint must be at least 1",
                entry.id.as_str()
            )));
        }
        let roster = ProgramRoster::new(entry.id, entry.role, entry.faculty);
        match (entry.role, entry.rank_hint) {
            (Role::Reference, Some(hint)) => hinted.push((hint, roster)),
            (Role::Reference, None) => unhinted.push(roster),
            (Role::Candidate, _) => candidates.push(roster),
        }
    }
    hinted.sort_by_key(|(hint, _)| *hint);
    let reference = hinted.into_iter().map(|(_, r)| r).chain(unhinted).collect();
    Ok((reference, candidates))
}

/// Parses both input files and builds a validated [`Corpus`].
pub fn parse_corpus(publications: &str, rosters: &str, window: YearWindow) -> Result<Corpus> {
    let records = parse_publications(publications)?;
    let (reference, candidates) = parse_rosters(rosters)?;
    Corpus::new(records, reference, candidates, window)
}
