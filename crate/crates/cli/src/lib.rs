//! The `rscore` command line.
//!
//! Reports go to standard output and diagnostics to standard error. Output
//! is buffered and written only when the whole subcommand succeeds, so a
//! failing run leaves standard output empty. Exit status: 0 on success, 1 on
//! a data error, 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rscore::{
    build_counts, build_reputation_model, compare_rankings, parse_corpus, parse_grades,
    reference_venue_set, score_programs, stability_sweep, Corpus, VenueMode, YearWindow,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rscore", version, about = "Reputation-based scoring of research programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check the inputs without computing anything.
    Validate(Common),
    /// Publication counts over the reference venues.
    Counts(Common),
    /// Venue reputations.
    Venues {
        #[command(flatten)]
        common: Common,
        /// Emit alpha, beta, P′ and gamma as a JSON audit document.
        #[arg(long)]
        dump_matrices: bool,
    },
    /// Score and rank the candidate programs.
    Rank(Common),
    /// Rank with nested reference sets Top(1)..Top(k) and correlate.
    Stability {
        #[command(flatten)]
        common: Common,
        /// Largest reference-set size; defaults to all reference programs.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: Option<u32>,
    },
    /// Compare the candidate ranking with an external grading.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Lines of `program_id<TAB>grade`, best first.
        #[arg(long)]
        grades: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Publications file, one JSON record per line.
    #[arg(long)]
    pubs: PathBuf,
    /// Rosters JSON document.
    #[arg(long)]
    rosters: PathBuf,
    /// First year kept (inclusive).
    #[arg(long)]
    from: Option<i32>,
    /// Last year kept (inclusive).
    #[arg(long)]
    to: Option<i32>,
    #[arg(long, value_enum, default_value_t = Mode::PerProgram)]
    venue_mode: Mode,
    /// Structured JSON output instead of TSV.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    PerProgram,
    Distinct,
}

impl From<Mode> for VenueMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::PerProgram => VenueMode::PerProgram,
            Mode::Distinct => VenueMode::DistinctPaper,
        }
    }
}

/// Failure of a subcommand; the message is printed verbatim.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<rscore::Error> for Failure {
    fn from(e: rscore::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load(common: &Common, diagnostics: &mut Vec<String>) -> Result<Corpus, Failure> {
    let window = YearWindow::new(common.from, common.to).map_err(|e| Failure::Usage(e.to_string()))?;
    let pubs = read(&common.pubs)?;
    let rosters = read(&common.rosters)?;
    let corpus = parse_corpus(&pubs, &rosters, window).map_err(|e| {
        let origin = match e {
            rscore::Error::MalformedLine { .. } => common.pubs.display().to_string(),
            _ => format!("{} + {}", common.pubs.display(), common.rosters.display()),
        };
        Failure::Data(format!("{origin}: {e}"))
    })?;
    if corpus.dropped_outside_window() > 0 {
        diagnostics.push(format!(
            "warning: dropped {} publication(s) outside the year window",
            corpus.dropped_outside_window()
        ));
    }
    Ok(corpus)
}

fn render(json: bool, value: impl FnOnce() -> serde_json::Value, tsv: impl FnOnce() -> String) -> String {
    if json {
        let mut text = serde_json::to_string_pretty(&value()).expect("json output");
        text.push('\n');
        text
    } else {
        tsv()
    }
}

fn candidate_ids(corpus: &Corpus) -> Vec<&str> {
    corpus
        .candidate_programs()
        .iter()
        .map(|r| r.id.as_str())
        .collect()
}

fn execute(command: Command, diagnostics: &mut Vec<String>) -> Result<String, Failure> {
    match command {
        Command::Validate(common) => {
            let corpus = load(&common, diagnostics)?;
            let venues = reference_venue_set(&corpus)?;
            let summary = format!(
                "ok: {} publications ({} outside window), {} reference programs, {} candidate programs, {} reference venues",
                corpus.publications().len(),
                corpus.dropped_outside_window(),
                corpus.reference_programs().len(),
                corpus.candidate_programs().len(),
                venues.len()
            );
            Ok(render(
                common.json,
                || {
                    serde_json::json!({
                        "publications": corpus.publications().len(),
                        "dropped_outside_window": corpus.dropped_outside_window(),
                        "reference_programs": corpus.reference_programs().len(),
                        "candidate_programs": corpus.candidate_programs().len(),
                        "reference_venues": venues.len(),
                    })
                },
                || summary + "\n",
            ))
        }
        Command::Counts(common) => {
            let corpus = load(&common, diagnostics)?;
            let counts = build_counts(&corpus, common.venue_mode.into())?;
            Ok(render(common.json, || counts.to_json(), || counts.to_tsv()))
        }
        Command::Venues {
            common,
            dump_matrices,
        } => {
            let corpus = load(&common, diagnostics)?;
            let counts = build_counts(&corpus, common.venue_mode.into())?;
            let model = build_reputation_model(&counts)?;
            if dump_matrices {
                return Ok(render(true, || model.matrices_json(), String::new));
            }
            Ok(render(common.json, || model.venues_json(), || model.venues_tsv()))
        }
        Command::Rank(common) => {
            let corpus = load(&common, diagnostics)?;
            let counts = build_counts(&corpus, common.venue_mode.into())?;
            let model = build_reputation_model(&counts)?;
            let report = score_programs(&model, &counts, &candidate_ids(&corpus))?;
            if report.all_zero {
                diagnostics.push("warning: every candidate scored zero".into());
            }
            Ok(render(common.json, || report.to_json(), || report.to_tsv()))
        }
        Command::Stability { common, k } => {
            let corpus = load(&common, diagnostics)?;
            let k = k.map_or(corpus.reference_programs().len(), |k| k as usize);
            let report = stability_sweep(&corpus, k, common.venue_mode.into())?;
            Ok(render(common.json, || report.to_json(), || report.to_tsv()))
        }
        Command::Compare { common, grades } => {
            let corpus = load(&common, diagnostics)?;
            let external = parse_grades(&read(&grades)?)
                .map_err(|e| Failure::Data(format!("{}: {e}", grades.display())))?;
            let counts = build_counts(&corpus, common.venue_mode.into())?;
            let model = build_reputation_model(&counts)?;
            let report = score_programs(&model, &counts, &candidate_ids(&corpus))?;
            let comparison = compare_rankings(&report, &external)?;
            Ok(render(common.json, || comparison.to_json(), || comparison.to_tsv()))
        }
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };

    let mut diagnostics = Vec::new();
    let outcome = execute(cli.command, &mut diagnostics);
    for line in &diagnostics {
        let _ = writeln!(stderr, "{line}");
    }
    match outcome {
        Ok(text) => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_DATA;
            }
            EXIT_OK
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Data(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_DATA
        }
    }
}
