//! Dichotomous Rasch models and scale reliability.
//!
//! Item difficulties are estimated by conditional maximum likelihood: person
//! parameters are eliminated by conditioning on raw scores, which leaves a
//! likelihood in the elementary symmetric functions of the item easiness
//! parameters `exp(-δ_j)`. Person tendencies are then solved one at a time
//! against the fixed difficulties.

mod esf;
mod matrix;
mod rasch;
mod reliability;

pub use esf::{elementary_symmetric, log_elementary_symmetric};
pub use matrix::ResponseMatrix;
pub use rasch::{
    estimate_tendencies, fit_rasch_blocks, fit_rasch_cml, fit_rasch_cml_from, BlockFit,
    PersonTendency, RaschFit, RaschOptions, THETA_BRACKET,
};
pub use reliability::cronbach_alpha;
