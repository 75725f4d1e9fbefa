//! Warmth and competence of social groups.
//!
//! Two routes: implicit scores from the mean cosine similarity between a
//! group's embedding and the words of a warmth or competence dictionary, and
//! explicit composites from survey trait ratings.

mod embeddings;
mod explicit;
mod scoring;

pub use embeddings::{cosine, load_embeddings, EmbeddingLoadReport, EmbeddingTable};
pub use explicit::{
    explicit_composites, load_survey, survey_to_csv, warmth_alpha_by_group, CompositeOptions,
    ExplicitComposite, RowRejection, SurveyRow, SCALE_MAX, SCALE_MIN,
};
pub use scoring::{
    dictionary_score, load_dictionary, score_groups, Dictionary, DictionaryScore, GroupScoring,
    ScoreFailure, StereotypeScore,
};
