//! Reputation propagation between reference programs and venues.
//!
//! Programs hand their reputation to venues in proportion to where they
//! publish (`beta`, T×V), and venues hand it back in proportion to who
//! publishes there (`alpha`, V×T). Together they form a periodic two-block
//! Markov chain. Only the aggregated T×T chain `P′ = beta · alpha` is solved;
//! venue reputations then follow from one multiplication.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};
use num_traits::ToPrimitive;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{ProgramId, VenueId};
use crate::counts::{CountsTable, VenueMode};
use crate::error::{Error, Result};

/// Build-time tolerance for row and column sums.
pub const STRUCTURE_TOLERANCE: f64 = 1e-12;
/// Tolerance for `P′` rows and the stationary fixed point.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// The two off-diagonal blocks of the program/venue chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionStructure {
    /// V×T; `alpha[[j, w]]` is the share of venue j's papers from program w.
    pub alpha: Array2<f64>,
    /// T×V; `beta[[w, j]]` is the share of program w's papers in venue j.
    pub beta: Array2<f64>,
    pub program_index: Vec<ProgramId>,
    pub venue_index: Vec<VenueId>,
    /// True when alpha columns were rescaled to sum to one (distinct-paper
    /// venue totals).
    pub alpha_renormalized: bool,
}

impl TransitionStructure {
    /// The full (T+V)×(T+V) chain with zero diagonal blocks, for audit
    /// output only.
    pub fn full_chain(&self) -> Array2<f64> {
        let t = self.program_index.len();
        let v = self.venue_index.len();
        let mut p = Array2::zeros((t + v, t + v));
        p.slice_mut(ndarray::s![..t, t..]).assign(&self.beta);
        p.slice_mut(ndarray::s![t.., ..t]).assign(&self.alpha);
        p
    }
}

fn to_f64(value: &num_rational::BigRational) -> f64 {
    value.to_f64().expect("finite count")
}

/// Fills alpha and beta from the reference-program counts.
pub fn build_transitions(counts: &CountsTable) -> Result<TransitionStructure> {
    let programs = counts.reference_programs().to_vec();
    let venues = counts.venues().to_vec();
    let (t, v) = (programs.len(), venues.len());
    if t == 0 || v == 0 {
        return Err(Error::EmptyMatrix);
    }

    let mut alpha = Array2::zeros((v, t));
    let mut beta = Array2::zeros((t, v));
    for (w, program) in programs.iter().enumerate() {
        let total = counts.program_total(program.as_str())?;
        if total == num_traits::Zero::zero() {
            return Err(Error::ZeroPublications(program.to_string()));
        }
        for (j, venue) in venues.iter().enumerate() {
            let n = counts.program_venue(program.as_str(), venue.as_str())?;
            let venue_total = counts.venue_total(venue.as_str())?;
            // ratios are formed exactly before rounding to f64
            beta[[w, j]] = to_f64(&(&n / &total));
            alpha[[j, w]] = to_f64(&(&n / &venue_total));
        }
    }

    let alpha_renormalized = counts.venue_mode() == VenueMode::DistinctPaper;
    if alpha_renormalized {
        log::warn!("distinct-paper venue totals: rescaling alpha columns to sum to one");
        for mut row in alpha.rows_mut() {
            let sum: f64 = row.sum();
            row.mapv_inplace(|x| x / sum);
        }
    }

    for (w, row) in beta.rows().into_iter().enumerate() {
        let sum = row.sum();
        debug_assert!((sum - 1.0).abs() <= STRUCTURE_TOLERANCE, "beta row {w} sums to {sum}");
    }
    for (j, row) in alpha.rows().into_iter().enumerate() {
        let sum = row.sum();
        debug_assert!((sum - 1.0).abs() <= STRUCTURE_TOLERANCE, "alpha venue {j} sums to {sum}");
    }

    Ok(TransitionStructure {
        alpha,
        beta,
        program_index: programs,
        venue_index: venues,
        alpha_renormalized,
    })
}

/// `P′ = beta · alpha`, the T×T chain over reference programs.
pub fn aggregate(structure: &TransitionStructure) -> Array2<f64> {
    structure.beta.dot(&structure.alpha)
}

/// Stationary distribution of an irreducible row-stochastic matrix by
/// Grassmann–Taksar–Heyman state reduction.
///
/// States are censored out one at a time from the last index down. The
/// pivot is the total outflow of the removed state to the states that
/// remain, computed as a sum of off-diagonal entries, so no subtraction
/// ever occurs.
pub fn stationary_gth(p: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let (rows, cols) = p.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (row, values) in p.rows().into_iter().enumerate() {
        let sum = values.sum();
        if values.iter().any(|&x| x < 0.0 || !x.is_finite()) || (sum - 1.0).abs() > SOLVER_TOLERANCE {
            return Err(Error::NotStochastic { row, sum });
        }
    }
    let components = strongly_connected_components(p);
    if components.len() > 1 {
        return Err(Error::Reducible { components });
    }

    let mut a = p.to_owned();
    for k in (1..n).rev() {
        let outflow: f64 = (0..k).map(|j| a[[k, j]]).sum();
        // irreducibility guarantees a positive outflow at every stage
        debug_assert!(outflow > 0.0);
        for i in 0..k {
            a[[i, k]] /= outflow;
        }
        for i in 0..k {
            let to_k = a[[i, k]];
            if to_k == 0.0 {
                continue;
            }
            for j in 0..k {
                a[[i, j]] += to_k * a[[k, j]];
            }
        }
    }

    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * a[[i, k]]).sum();
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    Ok(pi)
}

/// Components of the nonzero pattern, each sorted, listed by smallest state.
fn strongly_connected_components(p: ArrayView2<'_, f64>) -> Vec<Vec<usize>> {
    let n = p.nrows();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for ((i, j), &x) in p.indexed_iter() {
        if x > 0.0 && i != j {
            graph.add_edge(nodes[i], nodes[j], ());
        }
    }
    let mut components: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut states: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            states.sort_unstable();
            states
        })
        .collect();
    components.sort();
    components
}

/// `ν = γ · beta`, scaled so the largest venue is exactly 1.
pub fn venue_reputation(structure: &TransitionStructure, gamma: &[f64]) -> Result<Vec<f64>> {
    let raw = raw_venue_reputation(structure, gamma);
    let max = raw.iter().copied().fold(0.0, f64::max);
    if max.is_nan() || max <= 0.0 {
        return Err(Error::ZeroReputation);
    }
    Ok(raw.into_iter().map(|x| x / max).collect())
}

/// `γ · beta` before normalization; sums to one.
pub fn raw_venue_reputation(structure: &TransitionStructure, gamma: &[f64]) -> Vec<f64> {
    let gamma = ndarray::ArrayView1::from(gamma);
    gamma.dot(&structure.beta).to_vec()
}

/// A solved reputation model.
#[derive(Debug, Clone, PartialEq)]
pub struct ReputationModel {
    pub structure: TransitionStructure,
    pub p_prime: Array2<f64>,
    pub gamma: Vec<f64>,
    pub nu: Vec<f64>,
}

impl ReputationModel {
    pub fn venue_index(&self) -> &[VenueId] {
        &self.structure.venue_index
    }

    pub fn program_index(&self) -> &[ProgramId] {
        &self.structure.program_index
    }

    pub fn venue_reputation_of(&self, venue: &str) -> Option<f64> {
        self.venue_index()
            .iter()
            .position(|v| v.as_str() == venue)
            .map(|j| self.nu[j])
    }

    /// `‖γP′ − γ‖∞`.
    pub fn fixed_point_residual(&self) -> f64 {
        let gamma = ndarray::ArrayView1::from(&self.gamma[..]);
        let next = gamma.dot(&self.p_prime);
        next.iter()
            .zip(&self.gamma)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Venues with their reputation, highest first, ties by id.
    pub fn ranked_venues(&self) -> Vec<(&VenueId, f64)> {
        let mut rows: Vec<_> = self.venue_index().iter().zip(self.nu.iter().copied()).collect();
        rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows
    }

    /// SHA-256 over the indices and the bit patterns of every matrix and
    /// vector, hex encoded.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for id in self.program_index() {
            hasher.update(id.as_str().as_bytes());
            hasher.update([0u8]);
        }
        hasher.update([1u8]);
        for id in self.venue_index() {
            hasher.update(id.as_str().as_bytes());
            hasher.update([0u8]);
        }
        let matrices = [&self.structure.alpha, &self.structure.beta, &self.p_prime];
        for m in matrices {
            for x in m.iter() {
                hasher.update(x.to_bits().to_le_bytes());
            }
        }
        for x in self.gamma.iter().chain(&self.nu) {
            hasher.update(x.to_bits().to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }

    /// Venue table as TSV: `venue`, `nu` with six decimals.
    pub fn venues_tsv(&self) -> String {
        let mut out = String::from("venue\tnu\n");
        for (venue, nu) in self.ranked_venues() {
            out.push_str(&format!("{venue}\t{nu:.6}\n"));
        }
        out
    }

    pub fn venues_json(&self) -> serde_json::Value {
        let venues: Vec<_> = self
            .ranked_venues()
            .into_iter()
            .map(|(venue, nu)| serde_json::json!({"venue": venue, "nu": nu}))
            .collect();
        serde_json::json!({"model_digest": self.digest(), "venues": venues})
    }

    /// Audit document with every intermediate matrix.
    pub fn matrices_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump<'a> {
            model_digest: String,
            programs: &'a [ProgramId],
            venues: &'a [VenueId],
            alpha_renormalized: bool,
            alpha: Vec<Vec<f64>>,
            beta: Vec<Vec<f64>>,
            p_prime: Vec<Vec<f64>>,
            gamma: &'a [f64],
            nu: BTreeMap<&'a str, f64>,
        }
        let rows = |m: &Array2<f64>| m.rows().into_iter().map(|r| r.to_vec()).collect();
        serde_json::to_value(Dump {
            model_digest: self.digest(),
            programs: self.program_index(),
            venues: self.venue_index(),
            alpha_renormalized: self.structure.alpha_renormalized,
            alpha: rows(&self.structure.alpha),
            beta: rows(&self.structure.beta),
            p_prime: rows(&self.p_prime),
            gamma: &self.gamma,
            nu: self
                .venue_index()
                .iter()
                .map(VenueId::as_str)
                .zip(self.nu.iter().copied())
                .collect(),
        })
        .expect("matrices serialize")
    }
}

/// Builds transitions, aggregates, solves and derives venue reputations.
pub fn build_reputation_model(counts: &CountsTable) -> Result<ReputationModel> {
    let structure = build_transitions(counts)?;
    let p_prime = aggregate(&structure);
    let gamma = stationary_gth(p_prime.view())?;
    let nu = venue_reputation(&structure, &gamma)?;
    log::info!(
        "solved reputation model over {} reference programs and {} venues",
        gamma.len(),
        nu.len()
    );
    Ok(ReputationModel {
        structure,
        p_prime,
        gamma,
        nu,
    })
}
