//! Reputation-based scoring of research programs from publication listings.
//!
//! A handful of reference programs define which venues matter: reputation
//! flows from programs to the venues they publish in and back, and the
//! stationary point of that exchange gives every venue a weight. Candidate
//! programs are then scored by how much they publish in heavily weighted
//! venues.
//!
//! ```
//! use rscore::{build_counts, build_reputation_model, fixtures, score_programs, VenueMode};
//!
//! let corpus = fixtures::scored_example();
//! let counts = build_counts(&corpus, VenueMode::PerProgram)?;
//! let model = build_reputation_model(&counts)?;
//! let report = score_programs(&model, &counts, &["cand_a", "cand_b", "cand_c"])?;
//! assert_eq!(report.ranking(), ["cand_a", "cand_b", "cand_c"]);
//! # Ok::<(), rscore::Error>(())
//! ```
//!
//! The guide under `book/` walks through each stage; its code listings are
//! compiled and run as doctests of this crate.

pub mod analysis;
pub mod corpus;
pub mod counts;
mod error;
pub mod fixtures;
pub mod reputation;
pub mod scoring;

pub use analysis::{
    compare_rankings, parse_grades, spearman, spearman_scored, spearman_scores, stability_sweep,
    Comparison, Correlation, RankingComparison, StabilityReport,
};
pub use corpus::{
    parse_corpus, reference_venue_set, AuthorId, Corpus, ProgramId, ProgramRoster,
    PublicationRecord, Role, VenueId, YearWindow,
};
pub use counts::{
    build_counts, program_total, program_venue_count, venue_total, weighted_faculty_count,
    CountsTable, VenueMode,
};
pub use error::{Error, Result};
pub use reputation::{
    aggregate, build_reputation_model, build_transitions, stationary_gth, venue_reputation,
    ReputationModel, TransitionStructure,
};
pub use scoring::{per_faculty_view, raw_score, score_programs, ScoreReport, ScoreRow};

// Every chapter of the guide becomes a doc comment here so that
// `cargo test --doc` runs its listings.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/input-formats.md")]
    mod input_formats {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/reputation.md")]
    mod reputation {}
    #[doc = include_str!("../../../book/src/scoring.md")]
    mod scoring {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
