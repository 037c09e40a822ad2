//! Random corpora and independent reference computations shared by the
//! integration tests. Nothing here calls into the counting or solving code
//! under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rscore::{AuthorId, Corpus, ProgramId, ProgramRoster, PublicationRecord, Role, VenueId, YearWindow};

pub struct Shape {
    pub reference: usize,
    pub candidates: usize,
    pub max_faculty: usize,
    pub venues: usize,
    pub papers: usize,
    /// Every reference program publishes at least once in venue `v00`,
    /// which makes the aggregated chain strictly positive.
    pub shared_hub: bool,
}

pub fn random_corpus<R: Rng>(rng: &mut R, shape: &Shape) -> Corpus {
    let total = shape.reference + shape.candidates;
    let mut rosters = Vec::new();
    let mut everyone = Vec::new();
    for p in 0..total {
        let size = rng.gen_range(1..=shape.max_faculty);
        let faculty: Vec<AuthorId> = (0..size)
            .map(|f| AuthorId::new(format!("a{p}_{f}")).unwrap())
            .collect();
        everyone.extend(faculty.iter().cloned());
        let role = if p < shape.reference {
            Role::Reference
        } else {
            Role::Candidate
        };
        rosters.push(ProgramRoster::new(
            ProgramId::new(format!("prog{p:02}")).unwrap(),
            role,
            faculty,
        ));
    }
    for x in 0..3 {
        everyone.push(AuthorId::new(format!("external{x}")).unwrap());
    }

    let mut publications = Vec::new();
    let venue = |j: usize| VenueId::new(format!("v{j:02}")).unwrap();
    for (w, roster) in rosters.iter().take(shape.reference).enumerate() {
        // one guaranteed paper per reference program
        let j = if shape.shared_hub { 0 } else { rng.gen_range(0..shape.venues) };
        publications.push(PublicationRecord {
            id: format!("seed{w}"),
            venue: venue(j),
            year: 2000,
            authors: vec![roster.faculty[0].clone()],
        });
    }
    while publications.len() < shape.papers.max(shape.reference) {
        let k = publications.len();
        let n_authors = rng.gen_range(1..=4.min(everyone.len()));
        let authors: Vec<AuthorId> = everyone.choose_multiple(rng, n_authors).cloned().collect();
        publications.push(PublicationRecord {
            id: format!("paper{k}"),
            venue: venue(rng.gen_range(0..shape.venues)),
            year: rng.gen_range(1995..2015),
            authors,
        });
    }
    publications.shuffle(rng);

    let (reference, candidates): (Vec<_>, Vec<_>) =
        rosters.into_iter().partition(|r| r.role == Role::Reference);
    Corpus::new(publications, reference, candidates, YearWindow::default()).unwrap()
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Brute-force recount: for every paper and every roster, count the roster
/// members on the paper and hand out the 1/a shares.
pub struct Recount {
    pub venues: BTreeSet<String>,
    pub faculty: BTreeMap<(String, String, String), BigRational>,
    pub program_venue: BTreeMap<(String, String), BigRational>,
    pub venue_per_program: BTreeMap<String, BigRational>,
    pub venue_distinct: BTreeMap<String, BigRational>,
    pub program: BTreeMap<String, BigRational>,
}

pub fn recount(corpus: &Corpus) -> Recount {
    let is_reference_author = |a: &AuthorId| {
        corpus
            .reference_programs()
            .iter()
            .any(|r| r.faculty.contains(a))
    };
    let mut venues = BTreeSet::new();
    for paper in corpus.publications() {
        if paper.authors.iter().any(is_reference_author) {
            venues.insert(paper.venue.to_string());
        }
    }

    let mut faculty = BTreeMap::new();
    let mut program_venue = BTreeMap::new();
    let mut venue_per_program = BTreeMap::new();
    let mut venue_distinct = BTreeMap::new();
    let mut program = BTreeMap::new();
    for roster in corpus.programs() {
        program.insert(roster.id.to_string(), q(0, 1));
    }
    for v in &venues {
        venue_per_program.insert(v.clone(), q(0, 1));
        venue_distinct.insert(v.clone(), q(0, 1));
    }

    for paper in corpus.publications() {
        let v = paper.venue.to_string();
        if !venues.contains(&v) {
            continue;
        }
        if paper.authors.iter().any(is_reference_author) {
            *venue_distinct.get_mut(&v).unwrap() += q(1, 1);
        }
        for roster in corpus.programs() {
            let members: Vec<&AuthorId> = paper
                .authors
                .iter()
                .filter(|a| roster.faculty.contains(a))
                .collect();
            if members.is_empty() {
                continue;
            }
            let share = q(1, members.len() as i64);
            let mut program_sum = q(0, 1);
            for a in members {
                *faculty
                    .entry((roster.id.to_string(), a.to_string(), v.clone()))
                    .or_insert_with(|| q(0, 1)) += &share;
                program_sum += &share;
            }
            *program_venue
                .entry((roster.id.to_string(), v.clone()))
                .or_insert_with(|| q(0, 1)) += &program_sum;
            *program.get_mut(roster.id.as_str()).unwrap() += &program_sum;
            if roster.role == Role::Reference {
                *venue_per_program.get_mut(&v).unwrap() += &program_sum;
            }
        }
    }
    Recount {
        venues,
        faculty,
        program_venue,
        venue_per_program,
        venue_distinct,
        program,
    }
}

/// Random row-stochastic matrix whose nonzero pattern contains a random
/// Hamiltonian cycle, hence irreducible.
pub fn random_irreducible<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    let density: f64 = rng.gen_range(0.2..1.0);
    let mut m = vec![vec![0.0; n]; n];
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            if rng.gen_bool(density) {
                *x = rng.gen_range(0.0..1.0);
            }
        }
    }
    let mut cycle: Vec<usize> = (0..n).collect();
    cycle.shuffle(rng);
    for k in 0..n {
        let (i, j) = (cycle[k], cycle[(k + 1) % n]);
        m[i][j] += rng.gen_range(0.05..1.0);
    }
    for row in m.iter_mut() {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    m
}

/// Power iteration on the lazy chain (I + P) / 2, which shares the
/// stationary vector of P but is aperiodic.
pub fn power_iteration(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..2_000_000 {
        let mut next = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += pi[i] * p[i][j];
            }
        }
        for j in 0..n {
            next[j] = 0.5 * (next[j] + pi[j]);
        }
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        let delta = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if delta < 1e-16 {
            break;
        }
    }
    pi
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            for t in 0..k {
                out[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    out
}

/// Average ranks, larger value first, by direct counting.
pub fn naive_average_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let greater = values.iter().filter(|o| *o > v).count() as f64;
            let equal = values.iter().filter(|o| *o == v).count() as f64;
            greater + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn naive_spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (naive_average_ranks(a), naive_average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// End-to-end rescoring of the candidates from scratch: brute-force counts,
/// naive matrix products and power iteration. Returns candidate id and raw
/// score pairs.
pub fn oracle_scores(corpus: &Corpus) -> Vec<(String, f64)> {
    use num_traits::ToPrimitive;
    let counts = recount(corpus);
    let venues: Vec<&String> = counts.venues.iter().collect();
    let programs: Vec<String> = corpus
        .reference_programs()
        .iter()
        .map(|r| r.id.to_string())
        .collect();
    let n = |p: &str, v: &str| {
        counts
            .program_venue
            .get(&(p.to_string(), v.to_string()))
            .map(|x| x.to_f64().unwrap())
            .unwrap_or(0.0)
    };
    let beta: Vec<Vec<f64>> = programs
        .iter()
        .map(|p| {
            let total = counts.program[p].to_f64().unwrap();
            venues.iter().map(|v| n(p, v) / total).collect()
        })
        .collect();
    let alpha: Vec<Vec<f64>> = venues
        .iter()
        .map(|v| {
            let total = counts.venue_per_program[*v].to_f64().unwrap();
            programs.iter().map(|p| n(p, v) / total).collect()
        })
        .collect();
    let p_prime = matmul(&beta, &alpha);
    let gamma = power_iteration(&p_prime);
    let raw_nu = matmul(&[gamma], &beta).remove(0);
    let max = raw_nu.iter().copied().fold(0.0, f64::max);
    let nu: Vec<f64> = raw_nu.iter().map(|x| x / max).collect();
    corpus
        .candidate_programs()
        .iter()
        .map(|c| {
            let score = venues
                .iter()
                .zip(&nu)
                .map(|(v, w)| w * n(c.id.as_str(), v))
                .sum();
            (c.id.to_string(), score)
        })
        .collect()
}
