mod common;

use common::{random_corpus, Shape};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rscore::{
    build_counts, build_reputation_model, parse_corpus, raw_score, reference_venue_set,
    score_programs, spearman, spearman_scores, Corpus, PublicationRecord, VenueId, VenueMode,
    YearWindow,
};

fn corpus_from_seed(seed: u64, candidates: usize) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_corpus(
        &mut rng,
        &Shape {
            reference: 3,
            candidates,
            max_faculty: 4,
            venues: 6,
            papers: 80,
            shared_hub: true,
        },
    )
}

fn candidate_ids(corpus: &Corpus) -> Vec<String> {
    corpus.candidate_programs().iter().map(|r| r.id.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_serialize_round_trip(seed in any::<u64>()) {
        let corpus = corpus_from_seed(seed, 2);
        let again = parse_corpus(&corpus.publications_jsonl(), &corpus.rosters_json(), YearWindow::default()).unwrap();
        prop_assert_eq!(again.publications(), corpus.publications());
        prop_assert_eq!(again.reference_programs(), corpus.reference_programs());
        prop_assert_eq!(again.candidate_programs(), corpus.candidate_programs());
        prop_assert_eq!(again.publications_jsonl(), corpus.publications_jsonl());
    }

    #[test]
    fn venue_set_ignores_record_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        let corpus = corpus_from_seed(seed, 1);
        let mut records = corpus.publications().to_vec();
        records.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let shuffled = Corpus::new(
            records,
            corpus.reference_programs().to_vec(),
            corpus.candidate_programs().to_vec(),
            YearWindow::default(),
        ).unwrap();
        prop_assert_eq!(reference_venue_set(&corpus).unwrap(), reference_venue_set(&shuffled).unwrap());
    }

    #[test]
    fn spearman_symmetric_and_bounded(a in prop::collection::vec(-50i32..50, 2..30), seed in any::<u64>()) {
        let x: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let mut y = x.clone();
        y.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        match (spearman_scores(&x, &y), spearman_scores(&y, &x)) {
            (Ok(r1), Ok(r2)) => {
                prop_assert!((r1 - r2).abs() <= 1e-12);
                prop_assert!((-1.0..=1.0).contains(&r1));
            }
            (Err(e1), Err(e2)) => prop_assert_eq!(e1, e2),
            other => prop_assert!(false, "asymmetric outcome {:?}", other),
        }
    }

    #[test]
    fn spearman_identity_and_reversal(n in 2usize..40) {
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let reversed: Vec<String> = ids.iter().rev().cloned().collect();
        prop_assert_eq!(spearman(&ids, &ids).unwrap(), 1.0);
        prop_assert_eq!(spearman(&ids, &reversed).unwrap(), -1.0);
    }

    #[test]
    fn adding_a_paper_in_a_reference_venue_raises_the_score(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let corpus = corpus_from_seed(seed, 3);
        let ids = candidate_ids(&corpus);
        let counts = build_counts(&corpus, VenueMode::PerProgram).unwrap();
        let model = build_reputation_model(&counts).unwrap();
        let before = score_programs(&model, &counts, &ids).unwrap();

        let venues = reference_venue_set(&corpus).unwrap();
        let venue: &VenueId = pick.get(&venues);
        let target = &corpus.candidate_programs()[0];
        let mut records = corpus.publications().to_vec();
        records.push(PublicationRecord {
            id: "extra-paper".into(),
            venue: venue.clone(),
            year: 2000,
            authors: vec![target.faculty[0].clone()],
        });
        let grown = Corpus::new(
            records,
            corpus.reference_programs().to_vec(),
            corpus.candidate_programs().to_vec(),
            YearWindow::default(),
        ).unwrap();
        let counts2 = build_counts(&grown, VenueMode::PerProgram).unwrap();
        // reference venues and reputations are unchanged by a candidate paper
        prop_assert_eq!(&build_reputation_model(&counts2).unwrap(), &model);
        let after = score_programs(&model, &counts2, &ids).unwrap();
        let old = before.row(target.id.as_str()).unwrap();
        let new = after.row(target.id.as_str()).unwrap();
        prop_assert!(new.raw_score > old.raw_score);
        prop_assert!(new.rank_total <= old.rank_total);
        let direct = raw_score(&model, &counts2, target.id.as_str()).unwrap();
        prop_assert_eq!(direct, new.raw_score);
    }

    #[test]
    fn doubling_candidate_output_keeps_ratios(seed in any::<u64>()) {
        let corpus = corpus_from_seed(seed, 3);
        let ids = candidate_ids(&corpus);
        let counts = build_counts(&corpus, VenueMode::PerProgram).unwrap();
        let model = build_reputation_model(&counts).unwrap();
        let base = score_programs(&model, &counts, &ids).unwrap();

        // copy every paper with a candidate author, minus its reference
        // authors: candidate counts double and the model stays as it was
        let is_ref = |a: &str| corpus.reference_programs().iter().any(|r| r.contains(a));
        let is_cand = |a: &str| corpus.candidate_programs().iter().any(|r| r.contains(a));
        let mut records = corpus.publications().to_vec();
        let copies: Vec<_> = records
            .iter()
            .filter(|p| p.authors.iter().any(|a| is_cand(a.as_str())))
            .map(|p| PublicationRecord {
                id: format!("{}-copy", p.id),
                authors: p.authors.iter().filter(|a| !is_ref(a.as_str())).cloned().collect(),
                ..p.clone()
            })
            .collect();
        records.extend(copies);
        let doubled = Corpus::new(
            records,
            corpus.reference_programs().to_vec(),
            corpus.candidate_programs().to_vec(),
            YearWindow::default(),
        ).unwrap();
        let counts2 = build_counts(&doubled, VenueMode::PerProgram).unwrap();
        prop_assert_eq!(&build_reputation_model(&counts2).unwrap(), &model);
        let scaled = score_programs(&model, &counts2, &ids).unwrap();
        for row in &base.rows {
            let other = scaled.row(row.program_id.as_str()).unwrap();
            prop_assert!((other.raw_score - 2.0 * row.raw_score).abs() <= 1e-9 * row.raw_score.max(1.0));
            prop_assert!((other.r_score - row.r_score).abs() <= 1e-12);
            prop_assert_eq!(other.rank_total, row.rank_total);
            prop_assert_eq!(other.rank_per_faculty, row.rank_per_faculty);
        }
    }

    #[test]
    fn report_invariants(seed in any::<u64>()) {
        let corpus = corpus_from_seed(seed, 4);
        let ids = candidate_ids(&corpus);
        let counts = build_counts(&corpus, VenueMode::PerProgram).unwrap();
        let model = build_reputation_model(&counts).unwrap();
        let report = score_programs(&model, &counts, &ids).unwrap();
        let again = score_programs(&model, &counts, &ids).unwrap();
        prop_assert_eq!(&report, &again);
        let max = report.rows.iter().map(|r| r.r_score).fold(0.0, f64::max);
        if report.all_zero {
            prop_assert!(report.rows.iter().all(|r| r.r_score == 0.0));
        } else {
            prop_assert_eq!(max, 1.0);
        }
        for pair in report.rows.windows(2) {
            prop_assert!(pair[0].raw_score >= pair[1].raw_score);
            prop_assert!(pair[0].r_score >= pair[1].r_score);
            prop_assert!(pair[0].rank_total <= pair[1].rank_total);
        }
        for r in &report.rows {
            if r.raw_score == 0.0 {
                let worst = report.rows.iter().map(|x| x.rank_total).max().unwrap();
                prop_assert_eq!(r.rank_total, worst);
            }
            prop_assert!((0.0..=1.0).contains(&r.r_score_per_faculty));
        }
    }
}
