//! Classifier bias audit: repeated train/test splits, an embedding-average
//! logistic baseline, per-group false-positive and false-negative tallies,
//! and Poisson models relating error counts to group stereotype scores.
//!
//! Predictions from any external model can be audited by loading them with
//! [`load_predictions`] and passing them to [`tally_errors`].

mod associate;
mod baseline;
mod run;
mod splits;
mod tally;

pub use associate::{associate_bias, BiasAssociation, ErrorKind, Predictor};
pub use baseline::{featurize, predict_baseline, train_baseline, BaselineModel, BaselineOptions};
pub use run::{run_audit, AuditConfig, AuditOutcome};
pub use splits::{make_splits, Split, SplitPlan};
pub use tally::{
    load_predictions, predictions_to_csv, stats_to_csv, tally_errors, Denominator,
    PredictionRecord, SgtErrorStats,
};
