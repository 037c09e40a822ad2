use thiserror::Error;

/// Everything that can go wrong between reading the input files and
/// producing a report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("publications line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("rosters document: {0}")]
    MalformedRosters(String),

    #[error("publication {id:?}: empty author list")]
    EmptyAuthorList { id: String },

    #[error("publication {id:?}: author {author:?} listed twice")]
    DuplicateAuthor { id: String, author: String },

    #[error("duplicate publication id {0:?}")]
    DuplicatePublication(String),

    #[error("duplicate program id {0:?}")]
    DuplicateProgram(String),

    #[error("roster overlap: program {0:?} is listed as both reference and candidate")]
    RosterOverlap(String),

    #[error("program {0:?} has an empty roster")]
    EmptyRoster(String),

    #[error("program {program:?}: faculty {author:?} listed twice")]
    DuplicateFaculty { program: String, author: String },

    #[error("faculty {author:?} belongs to both {first:?} and {second:?}")]
    SharedFaculty {
        author: String,
        first: String,
        second: String,
    },

    #[error("invalid identifier: {0}")]
    InvalidId(String),

    #[error("invalid year window: from {from} is after to {to}")]
    InvalidWindow { from: i32, to: i32 },

    #[error("no reference-program publication falls in the corpus, so there are no reference venues")]
    EmptyVenueSet,

    #[error("unknown program {0:?}")]
    UnknownProgram(String),

    #[error("faculty {author:?} is not on the roster of {program:?}")]
    NotInRoster { program: String, author: String },

    #[error("venue {0:?} is not a reference venue")]
    UnknownVenue(String),

    #[error("reference program {0:?} has no publications in the reference venues")]
    ZeroPublications(String),

    #[error("transition matrix is empty")]
    EmptyMatrix,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("row {row} is not stochastic (sum {sum})")]
    NotStochastic { row: usize, sum: f64 },

    #[error("chain is reducible; strongly connected components: {components:?}")]
    Reducible { components: Vec<Vec<usize>> },

    #[error("venue reputation vector is identically zero")]
    ZeroReputation,

    #[error("no programs to score")]
    NoCandidates,

    #[error("rank correlation needs at least 2 items, got {0}")]
    TooFewItems(usize),

    #[error("rank correlation is undefined: a ranking has zero variance")]
    Degenerate,

    #[error("reference set size must be at least 1")]
    InvalidSweepSize,

    #[error("rankings do not cover the same set of programs")]
    MismatchedRankings,

    #[error("need {needed} reference programs, found {found}")]
    NotEnoughReferences { needed: usize, found: usize },

    #[error("reference set size {size}: {source}")]
    Sweep { size: usize, source: Box<Error> },

    #[error("no program appears in both the score report and the external grades")]
    EmptyIntersection,

    #[error("grades line {line}: {message}")]
    MalformedGrades { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
