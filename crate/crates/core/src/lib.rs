//! Analysis toolkit for late-interaction (MaxSim) retrieval.
//!
//! Scores and re-ranks first-stage candidates from token-embedding dumps,
//! then measures how the model uses individual query terms:
//!
//! - term importance, as the AP correlation between the full ranking and
//!   the ranking with one query word masked;
//! - Δ_ES, the gap between exact-match and soft-match MaxSim scores;
//! - match overlap, i.e. which document tokens each query token lands on;
//! - spectral concentration of each subword's contextual embeddings;
//!
//! each joined with corpus IDF.

pub mod analysis;
pub mod correlation;
pub mod error;
pub mod linalg;
pub mod model;
pub mod report;
pub mod scoring;
pub mod synth;

pub use error::{Error, Result};
