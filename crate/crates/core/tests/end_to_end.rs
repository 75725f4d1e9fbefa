use std::fs;

use annobias_core::audit::{associate_bias, run_audit, AuditConfig, ErrorKind, Predictor};
use annobias_core::corpus::{load_annotations, load_lexicon, load_posts, mention_index};
use annobias_core::pipeline::{fit_hate_counts, response_matrix, study1_table, EffectsSpec};
use annobias_core::psychometrics::{
    estimate_tendencies, fit_rasch_cml, RaschOptions, ResponseMatrix,
};
use annobias_core::simulate::{
    recovery_report, simulate_annotations, simulate_audit_scenario, AuditScenarioConfig, Estimates,
    SimConfig,
};
use annobias_core::stereotype::{
    explicit_composites, load_dictionary, load_embeddings, load_survey, score_groups,
    survey_to_csv, CompositeOptions,
};
use annobias_core::Execution;

#[test]
fn study1_files_round_trip_and_recover_truth() {
    let cfg = SimConfig {
        n_participants: 150,
        ..SimConfig::default()
    };
    let data = simulate_annotations(&cfg, 21).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n);
    fs::write(path("annotations.csv"), data.annotations.to_csv()).unwrap();
    fs::write(path("posts.jsonl"), data.posts.to_jsonl()).unwrap();
    fs::write(path("lexicon.tsv"), data.lexicon.to_tsv()).unwrap();
    fs::write(path("survey.csv"), survey_to_csv(&data.survey)).unwrap();
    let matrix = response_matrix(&data.annotations).unwrap();
    fs::write(path("responses.csv"), matrix.to_wide_csv()).unwrap();

    let ann = load_annotations(path("annotations.csv")).unwrap();
    let posts = load_posts(path("posts.jsonl")).unwrap();
    let lexicon = load_lexicon(path("lexicon.tsv")).unwrap();
    let survey = load_survey(path("survey.csv")).unwrap();
    assert_eq!(ann.records(), data.annotations.records());
    assert_eq!(survey, data.survey);

    let groups: Vec<String> = lexicon.groups().map(str::to_owned).collect();
    let (index, _) = mention_index(&posts, &lexicon);
    let (composites, rejected) = explicit_composites(&survey, CompositeOptions::default());
    assert!(rejected.is_empty());
    let rows = study1_table(&ann, &index, &groups, &composites, Execution::Parallel).unwrap();
    assert_eq!(rows.len(), 150 * 8);
    let fit = fit_hate_counts(&rows, EffectsSpec::default()).unwrap();

    let reloaded = ResponseMatrix::load_wide_csv(path("responses.csv")).unwrap();
    let rasch = fit_rasch_cml(&reloaded, &RaschOptions::default()).unwrap();
    let tendencies = estimate_tendencies(&reloaded, &rasch.difficulties).unwrap();
    let estimates = Estimates {
        theta: tendencies
            .iter()
            .map(|t| (t.person_id.clone(), t.theta))
            .collect(),
        delta: rasch
            .item_ids
            .iter()
            .cloned()
            .zip(rasch.difficulties.iter().copied())
            .collect(),
        coefficients: vec![("competence".into(), fit.fit.coef("competence").unwrap())],
    };
    let report = recovery_report(&estimates, &data.truth).unwrap();
    assert_eq!(report.n_delta, 56);
    assert!(report.theta_r.unwrap() > 0.85, "{report:?}");
    assert!(report.delta_r.unwrap() > 0.85, "{report:?}");
    assert_eq!(report.signs[0].matches, Some(true));
}

#[test]
fn audit_scenario_scores_survive_text_round_trip() {
    let cfg = AuditScenarioConfig {
        n_items: 500,
        ..AuditScenarioConfig::default()
    };
    let s = simulate_audit_scenario(&cfg, 8).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n);
    fs::write(path("embeddings.txt"), s.embeddings.to_text()).unwrap();
    let words = |d: &annobias_core::stereotype::Dictionary| -> String {
        d.words().iter().map(|w| format!("{w}\n")).collect()
    };
    fs::write(path("warmth.txt"), words(&s.warmth_dictionary)).unwrap();
    fs::write(path("competence.txt"), words(&s.competence_dictionary)).unwrap();

    let table = load_embeddings(path("embeddings.txt")).unwrap();
    let warmth = load_dictionary(path("warmth.txt"), "warmth").unwrap();
    let competence = load_dictionary(path("competence.txt"), "competence").unwrap();
    let scoring = score_groups(
        &s.lexicon,
        &warmth,
        &competence,
        &table,
        Execution::Sequential,
    );
    assert_eq!(scoring, s.scores);

    let (mentions, _) = mention_index(&s.posts, &s.lexicon);
    let config = AuditConfig {
        iterations: 5,
        ..AuditConfig::default()
    };
    let from_disk = run_audit(
        &s.annotations,
        &s.posts,
        &mentions,
        &table,
        &config,
        Execution::Parallel,
    )
    .unwrap();
    let in_memory = run_audit(
        &s.annotations,
        &s.posts,
        &mentions,
        &s.embeddings,
        &config,
        Execution::Sequential,
    )
    .unwrap();
    assert_eq!(from_disk.stats, in_memory.stats);
    let assoc = associate_bias(
        &from_disk.stats,
        &scoring.scores,
        ErrorKind::Fp,
        Predictor::Competence,
    )
    .unwrap();
    assert!(assoc.beta < 0.0);
    assert_eq!(assoc.groups.len(), cfg.n_groups);
}
