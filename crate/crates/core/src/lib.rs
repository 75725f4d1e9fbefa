//! Measurement toolkit for annotated hate-speech corpora.
//!
//! The crate covers the full chain from raw annotations to bias estimates:
//!
//! * [`corpus`]: posts, long-format annotations, social-group-token lexicons,
//!   mention matching and majority labels.
//! * [`disagreement`]: item, participant and group-level disagreement plus
//!   Fleiss' kappa and PABAK.
//! * [`psychometrics`]: Rasch item difficulties by conditional maximum
//!   likelihood, person tendencies and Cronbach's alpha.
//! * [`stereotype`]: warmth/competence from word embeddings and dictionaries,
//!   and explicit survey composites.
//! * [`glm`]: IRLS fits for Poisson, logistic and linear models, permutation
//!   tests and two-way ANOVA.
//! * [`audit`]: repeated train/test splits, a baseline classifier, per-group
//!   error tallies and Poisson bias associations.
//! * [`simulate`]: synthetic populations with planted effects for recovery
//!   testing.
//! * [`pipeline`]: the per-(participant, group) analysis table that ties the
//!   modules together.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise; see [`exec::Execution`].

pub mod audit;
pub mod corpus;
pub mod disagreement;
mod error;
pub mod exec;
pub mod glm;
mod linalg;
pub mod pipeline;
pub mod psychometrics;
pub mod simulate;
pub mod stereotype;

pub use error::{Error, Result};
pub use exec::Execution;
