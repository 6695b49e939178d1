mod common;

use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use common::oracle;
use qqoqcp_core::evaluate::{
    agreement, answer_count_stats, answers_at, pairwise_agreement, resolve_participants, threshold_sweep,
    AnnotatedCorpus, CorpusArticle, Participant,
};
use qqoqcp_core::extract::SimilarityConfig;
use qqoqcp_core::score::ScoredCandidate;
use qqoqcp_core::{Error, Pipeline, PerQuestion, Question};

fn v(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn corpus() -> AnnotatedCorpus {
    AnnotatedCorpus::load(&common::corpus_dir()).unwrap()
}

fn annotators(c: &AnnotatedCorpus) -> Vec<Participant> {
    c.annotators().into_iter().map(|id| Participant::annotator(c, id).unwrap()).collect()
}

fn scored_corpus(c: &AnnotatedCorpus) -> BTreeMap<String, PerQuestion<Vec<ScoredCandidate>>> {
    let p = Pipeline::heuristic();
    c.articles
        .iter()
        .map(|a| (a.article.id.clone(), p.score(&a.article).unwrap().scored))
        .collect()
}

#[test]
fn worked_example() {
    let sim = SimilarityConfig::default();
    let a = agreement(&v(&["Justin Trudeau"]), &v(&["François Legault", "Justin Trudeau"]), &sim);
    assert_abs_diff_eq!(a, 2.0 / 3.0, epsilon = 1e-9);
}

#[test]
fn fixture_corpus_shape() {
    let c = corpus();
    assert_eq!(c.articles.len(), 10);
    assert_eq!(c.annotators().into_iter().collect::<Vec<_>>(), vec!["a1", "a2", "a3", "a4"]);
    assert!(c.validate().is_empty());
}

#[test]
fn matrix_is_symmetric_with_unit_diagonal() {
    let c = corpus();
    let ps = annotators(&c);
    let report = pairwise_agreement(&c, &ps, &SimilarityConfig::default()).unwrap();
    for q in Question::ALL {
        let m = report.questions.get(q);
        for i in 0..ps.len() {
            assert_eq!(m[i][i], Some(1.0), "{q} diagonal");
            for j in 0..ps.len() {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
    }
    let mean = report.mean.unwrap();
    assert!(mean > 0.0 && mean < 1.0);
}

#[test]
fn pair_average_matches_the_oracle() {
    let c = corpus();
    let ps = annotators(&c);
    let report = pairwise_agreement(&c, &ps, &SimilarityConfig::default()).unwrap();
    for q in Question::ALL {
        for (i, p) in ps.iter().enumerate() {
            for (j, r) in ps.iter().enumerate() {
                let vals: Vec<f64> = c
                    .ids()
                    .into_iter()
                    .filter_map(|id| Some(oracle::agreement(p.answers_to(id, q)?, r.answers_to(id, q)?, 0.5)))
                    .collect();
                let expected = (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64);
                match (report.questions.get(q)[i][j], expected) {
                    (Some(a), Some(b)) => assert_abs_diff_eq!(a, b, epsilon = 1e-12),
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }
}

#[test]
fn unannotated_questions_are_skipped() {
    let c = corpus();
    let a4 = Participant::annotator(&c, "a4").unwrap();
    assert!(a4.answers_to("a01", Question::How).is_none());
    assert!(a4.answers_to("a02", Question::How).is_some());
    let counts = answer_count_stats(&c, &[a4]);
    // how is annotated by a4 on a02, a03, a04, a06, a07, a09
    let how_lens = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
    assert_abs_diff_eq!(
        counts.questions.how[0].unwrap(),
        how_lens.iter().sum::<f64>() / how_lens.len() as f64,
        epsilon = 1e-12
    );
}

#[test]
fn system_versus_four_annotators() {
    let c = corpus();
    let p = Pipeline::heuristic();
    let system = Participant::complete(
        "system",
        c.articles
            .iter()
            .map(|a| (a.article.id.clone(), p.process(&a.article).unwrap().answers.texts()))
            .collect(),
    );
    let ids: Vec<String> = ["system", "a1", "a2", "a3", "a4"].iter().map(|s| s.to_string()).collect();
    let ps = resolve_participants(&c, &ids, &[system.clone()]).unwrap();
    let report = pairwise_agreement(&c, &ps, &SimilarityConfig::default()).unwrap();
    let row = report.versus("system").unwrap();
    for q in Question::ALL {
        assert_eq!(row.get(q).len(), 4);
    }
    let twice = pairwise_agreement(&c, &[system.clone(), system], &SimilarityConfig::default()).unwrap();
    assert!(Question::ALL.iter().all(|&q| twice.questions.get(q)[0][1] == Some(1.0)));
}

#[test]
fn participant_errors() {
    let c = corpus();
    assert!(resolve_participants(&c, &[], &[]).is_err());
    assert!(matches!(
        resolve_participants(&c, &["nobody".into()], &[]),
        Err(Error::UnknownParticipant(_))
    ));
    assert!(pairwise_agreement(&c, &[], &SimilarityConfig::default()).is_err());
}

#[test]
fn sweep_matches_brute_force() {
    let c = corpus();
    let anns = annotators(&c);
    let scored = scored_corpus(&c);
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for q in Question::ALL {
        let r = threshold_sweep(&scored, &anns, &grid, q, &SimilarityConfig::default()).unwrap();
        assert_eq!(r.curve.len(), grid.len());
        for point in &r.curve {
            let per_annotator: Vec<f64> = anns
                .iter()
                .filter_map(|ann| {
                    let vals: Vec<f64> = scored
                        .iter()
                        .filter_map(|(id, s)| {
                            let gold = ann.answers_to(id, q)?;
                            let mut kept: Vec<&ScoredCandidate> =
                                s.get(q).iter().filter(|x| x.total >= point.tau).collect();
                            kept.sort_by(|a, b| b.total.total_cmp(&a.total));
                            let sys: Vec<String> = kept.iter().map(|x| x.candidate.text.clone()).collect();
                            Some(oracle::agreement(&sys, gold, 0.5))
                        })
                        .collect();
                    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
                })
                .collect();
            let expected = per_annotator.iter().sum::<f64>() / per_annotator.len() as f64;
            assert_abs_diff_eq!(point.agreement.unwrap(), expected, epsilon = 1e-12);
        }
        let best = r.best.unwrap();
        let max = r.curve.iter().filter_map(|p| p.agreement).fold(f64::MIN, f64::max);
        let first_max = r.curve.iter().find(|p| p.agreement == Some(max)).unwrap().tau;
        assert_eq!(best, first_max);
    }
}

#[test]
fn sweep_grid_rules() {
    let c = corpus();
    let anns = annotators(&c);
    let scored = scored_corpus(&c);
    let sim = SimilarityConfig::default();
    let one = threshold_sweep(&scored, &anns, &[0.3], Question::Who, &sim).unwrap();
    assert_eq!(one.curve.len(), 1);
    assert_eq!(one.best, Some(0.3));
    assert!(threshold_sweep(&scored, &anns, &[], Question::Who, &sim).is_err());
    assert!(threshold_sweep(&scored, &anns, &[0.1, -0.2], Question::Who, &sim).is_err());
    // above every total nothing is selected, so both points tie
    let tie = threshold_sweep(&scored, &anns, &[2.0, 1.5], Question::What, &sim).unwrap();
    assert_eq!(tie.curve[0].agreement, tie.curve[1].agreement);
    assert_eq!(tie.best, Some(1.5));
}

#[test]
fn answers_at_is_ranked_and_thresholded() {
    let c = corpus();
    let scored = scored_corpus(&c);
    let s = scored["a03"].get(Question::Who);
    let all = answers_at(s, 0.0);
    assert_eq!(all.len(), s.len());
    assert!(answers_at(s, 1.01).is_empty());
    let mut totals: Vec<f64> = s.iter().map(|x| x.total).collect();
    totals.sort_by(|a, b| b.total_cmp(a));
    let top = s.iter().find(|x| x.total == totals[0]).unwrap();
    assert_eq!(all[0], top.candidate.text);
}

#[test]
fn validation_flags_non_verbatim_gold() {
    let mut c = corpus();
    let article: &mut CorpusArticle = &mut c.articles[0];
    article.gold.get_mut("a1").unwrap().who = Some(v(&["Quelqu'un d'autre"]));
    let issues = c.validate();
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].id, "a01");
    assert!(issues[0].message.contains("a1/who"));
}

#[test]
fn corpus_files_round_trip() {
    let c = corpus();
    for a in &c.articles {
        let again = CorpusArticle::parse(&a.to_json()).unwrap();
        assert_eq!(&again, a);
    }
}

#[test]
fn missing_article_is_reported_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["a01.json", "a02.json"] {
        std::fs::copy(common::corpus_dir().join(f), dir.path().join(f)).unwrap();
    }
    std::fs::write(dir.path().join("manifest.txt"), "a01\na02\nghost\n").unwrap();
    let (c, failures) = AnnotatedCorpus::load_partial(dir.path()).unwrap();
    assert_eq!(c.ids(), vec!["a01", "a02"]);
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].0, "ghost");
    assert!(AnnotatedCorpus::load(dir.path()).is_err());
}
