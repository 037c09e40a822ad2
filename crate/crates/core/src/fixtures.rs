//! Bundled example corpora.
//!
//! `worked_example` is the two-program, three-venue corpus used throughout
//! the guide: Program 1 places 3, 2 and 1 papers in v1, v2 and v3, Program 2
//! places 2, 4 and 2, and the two programs share both of Program 1's papers
//! in v2. `scored_example` adds three candidate programs on top of it.

use crate::corpus::{parse_corpus, Corpus, YearWindow};

pub const WORKED_EXAMPLE_PUBLICATIONS: &str =
    include_str!("../data/worked_example/publications.jsonl");
pub const WORKED_EXAMPLE_ROSTERS: &str = include_str!("../data/worked_example/rosters.json");
pub const SCORED_EXAMPLE_PUBLICATIONS: &str =
    include_str!("../data/scored_example/publications.jsonl");
pub const SCORED_EXAMPLE_ROSTERS: &str = include_str!("../data/scored_example/rosters.json");
pub const SCORED_EXAMPLE_GRADES: &str = include_str!("../data/scored_example/grades.tsv");

pub fn worked_example() -> Corpus {
    parse_corpus(
        WORKED_EXAMPLE_PUBLICATIONS,
        WORKED_EXAMPLE_ROSTERS,
        YearWindow::default(),
    )
    .expect("bundled corpus is valid")
}

pub fn scored_example() -> Corpus {
    parse_corpus(
        SCORED_EXAMPLE_PUBLICATIONS,
        SCORED_EXAMPLE_ROSTERS,
        YearWindow::default(),
    )
    .expect("bundled corpus is valid")
}
