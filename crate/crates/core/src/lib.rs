//! Reputation and quality scoring for bipartite interaction networks.
//!
//! Users interact with items (papers, posts, files); authors write them. From
//! those two sparse bipartite layers this crate estimates, by coupled
//! fixed-point iteration, a reputation score per user, a quality score per
//! item, and optionally a credit score per author. Four related estimators
//! are provided — [`algorithms::bihits`], [`algorithms::qr`],
//! [`algorithms::eigenrumor`], and [`algorithms::qrc`] — differing in how
//! aggressively they damp hyperactive users and whether author identity
//! feeds back into item quality.
//!
//! The crate also ships the agent-based generator used to benchmark the
//! estimators ([`simulator`]), evaluation utilities ([`evaluation`]), and a
//! CSV ingestion pipeline ([`ingestion`]).
//!
//! ```
//! use qrc_core::{ConvergenceConfig64, UserItemNetwork64, algorithms::bihits};
//!
//! // Two users and two items: user 0 uploaded item 0 (weight 1.0) and
//! // downloaded item 1 (weight 0.1); user 1 downloaded item 0.
//! let network = UserItemNetwork64::from_edges(&[
//!     (0, 0, 1.0),
//!     (0, 1, 0.1),
//!     (1, 0, 0.1),
//! ])?;
//! let scores = bihits(&network, true, &ConvergenceConfig64::default())?;
//! assert!(scores.converged);
//! assert!(scores.quality.values()[0] > scores.quality.values()[1]);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! All numeric code is generic over [`scalar::Scalar`] (`f32` or `f64`); the
//! `*64` aliases at the crate root pin the common double-precision choice.

pub mod algorithms;
pub mod evaluation;
pub mod ingestion;
pub mod network;
pub mod scalar;
pub mod simulator;

pub use algorithms::{
    bihits, eigenrumor, fixed_point_iterate, qr, qrc, AlgorithmError, ConvergenceConfig, QrParams,
    QrcParams, ScoreSet,
};
pub use evaluation::{
    correlation_report, mann_whitney_u, pearson, top_k, Alternative, CorrelationReport, EvalError,
    MwuResult, PvalueMethod,
};
pub use ingestion::{Action, Corpus, IngestError, InteractionEvent, PaperRecord, WeightScheme};
pub use network::{AuthorPaperNetwork, NetworkError, ScoreVector, Side, UserItemNetwork};
pub use scalar::Scalar;
pub use simulator::{run_simulation, GroundTruth, SimConfig, SimResult};

/// Double-precision user-item network.
pub type UserItemNetwork64 = network::UserItemNetwork<f64>;
/// Double-precision author-paper network.
pub type AuthorPaperNetwork64 = network::AuthorPaperNetwork<f64>;
/// Double-precision score vector.
pub type ScoreVector64 = network::ScoreVector<f64>;
/// Double-precision scoring result.
pub type ScoreSet64 = algorithms::ScoreSet<f64>;
/// Double-precision damping/shift parameters for the user-item iteration.
pub type QrParams64 = algorithms::QrParams<f64>;
/// Double-precision parameters including the author-credit extension.
pub type QrcParams64 = algorithms::QrcParams<f64>;
/// Double-precision convergence settings.
pub type ConvergenceConfig64 = algorithms::ConvergenceConfig<f64>;
/// Double-precision generator configuration.
pub type SimConfig64 = simulator::SimConfig<f64>;
/// Double-precision generator output.
pub type SimResult64 = simulator::SimResult<f64>;
