//! Ranking-quality metrics for binary classifiers: AUC, PPV at the
//! base-rate cut, and the exact envelopes that bound one given the other.

pub mod cli;
pub mod envelopes;
pub mod ingest;
pub mod metrics;
pub mod oracle;
pub mod ppv;
pub mod ranking;
pub mod roc;

/// Exact fraction used wherever closed forms are compared without tolerance.
pub type Rational = num_rational::Ratio<i128>;

pub use envelopes::{ClassRatio, EnvelopeError};
pub use ingest::IngestError;
pub use metrics::MetricError;
pub use oracle::OracleError;
pub use ppv::PpvError;
pub use ranking::{Label, Ranking, RankingError, ScoredRecord, TiePolicy};
pub use roc::RocError;

/// Union of the module errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Roc(#[from] RocError),
    #[error(transparent)]
    Ppv(#[from] PpvError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}
