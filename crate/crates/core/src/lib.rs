//! Synthetic market generator and analysis toolkit.
//!
//! The crate simulates a trading day as a superposition of metaorders: parent
//! orders that execute incrementally as Poisson-spaced child orders of common
//! sign and volume. Child orders from all metaorders are merged into a single
//! time-sorted tape, and a mid-price path is reconstructed by summing a
//! power-law propagator kernel over every past execution. On top of the
//! generated (flow, price) pairs, [`stats`] computes the standard
//! flow/price diagnostics (sign autocorrelation by volume, generalized
//! imbalance scaling, signature plots, aggregated impact collapse,
//! flow/return covariance and correlation surfaces) and [`proxy`]
//! reconstructs metaorder groupings from the anonymized tape and measures
//! peak-impact curves.
//!
//! # Pipeline
//!
//! ```text
//! SimulationConfig ──▶ flowgen::build_day_flow ──▶ Vec<ChildOrderEvent>
//!                                                        │
//!                                  impact::reconstruct_prices (O(N²))
//!                                                        │
//!                     ┌──────────────────────────────────┤
//!                     ▼                                  ▼
//!              stats::* diagnostics              proxy::* impact curves
//! ```
//!
//! # Determinism
//!
//! Every random choice flows from a single `u64` seed through per-purpose,
//! per-day ChaCha streams (see [`seeding`]). Identical configurations produce
//! bit-identical tapes and prices regardless of thread count: parallelism is
//! over days and over price evaluation points, never inside a single
//! accumulation.

pub mod config;
pub mod flowgen;
pub mod impact;
pub mod io;
pub mod proxy;
pub mod seeding;
pub mod stats;

pub use config::{Scenario, SimulationConfig};
pub use flowgen::{build_day_flow, ChildOrderEvent, DayFlow, Metaorder};
pub use impact::{reconstruct_prices, PriceSeries, PropagatorParams};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Configuration rejected before any computation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An argument left the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The clipped-Gaussian sign construction has no valid spectral
    /// representation for the requested correlation target.
    #[error(
        "sign covariance is not positive semidefinite: spectral component {index} \
         has eigenvalue {eigenvalue:.6e}"
    )]
    SignCovarianceNotPsd { index: usize, eigenvalue: f64 },

    /// Event input violated the time-sorted precondition.
    #[error("events not sorted by timestamp at index {0}")]
    UnsortedEvents(usize),

    /// A regression or nonlinear fit could not be performed.
    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error in {path}: {msg}")]
    Csv { path: String, msg: String },

    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad configuration or malformed input files,
    /// as opposed to numerical failures at run time.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::Csv { .. } | Error::Io(_)
        )
    }
}
