//! Diversity-multiplexing tradeoff of dynamic decode-and-forward (DDF) and
//! hybrid DDF/amplify-and-forward (HDAF) relaying for the two-user
//! multiple-access relay channel with finite block length.
//!
//! The crate has four layers:
//!
//! * [`piecewise`] — extended-real exponent values and piecewise curves in
//!   the multiplexing gain, with exact pointwise-minimum algebra.
//! * [`dmt`] — every closed-form exponent: per-decision-time relay and
//!   destination terms, the finite-`M` DDF tradeoff, the MAF and HDAF
//!   tradeoffs, and the infinite-block-length limit.
//! * [`oracle`] — an independent brute-force grid solver over channel
//!   exponent space that re-derives the closed forms from the raw outage
//!   sets and certifies the correlated-term and hybrid-protocol
//!   inequalities.
//! * [`outage_mc`] and [`codeword_sim`] — Monte Carlo: outage-probability
//!   sweeps over Rayleigh fading with diversity-slope fitting, and a
//!   desk-scale codeword-level simulation of the protocols with Gaussian
//!   random codebooks, the bounded-distance relay decoder, and GLRT joint
//!   decoding at the destination.

pub mod codeword_sim;
pub mod dmt;
pub mod oracle;
pub mod outage_mc;
pub mod piecewise;

pub use piecewise::{DmtCurve, ExtReal};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An argument violating a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Not enough usable data to produce the requested estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
