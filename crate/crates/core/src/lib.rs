//! Outage probability of decode-and-forward multi-relay selection in a
//! cognitive relay network operating under imperfect spectrum sensing.
//!
//! The crate has two independent routes to the same numbers:
//!
//! * [`analytic`] evaluates closed-form outage probabilities for
//!   multi-relay selection (MRC over the whole decoding set), best-relay
//!   selection and direct transmission;
//! * [`montecarlo`] simulates Rayleigh-faded sample paths conditioned on a
//!   detected spectrum hole and estimates the same probabilities.
//!
//! [`model`] holds the shared parameter set and [`specfun`] the integer-shape
//! incomplete gamma machinery the closed forms are built on.
//!
//! Parallel loops use rayon when the `parallel` feature (on by default) is
//! enabled and fall back to plain iteration otherwise. Either way the results
//! are bit-identical.

pub mod analytic;
mod error;
pub mod model;
pub mod montecarlo;
mod parallel;
mod quad;
pub mod specfun;
mod sum;

pub use error::{Error, Result};
pub use model::{ChannelVariances, Hypothesis, Posterior, Scheme, SnrThreshold, SystemParams};
pub use montecarlo::OutageEstimate;
pub use analytic::OutageBreakdown;
