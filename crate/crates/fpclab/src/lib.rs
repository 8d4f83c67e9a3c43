//! Outage probability and transmission capacity of decentralized wireless
//! networks under fractional power control.
//!
//! Transmitters form a Poisson point process; each sends to a receiver at
//! fixed distance with power proportional to H^{-s}, where H is its own
//! channel power and s interpolates between constant power (s = 0) and
//! channel inversion (s = 1). The crate evaluates the outage probability
//! q = P(SINR < beta) three ways:
//!
//! * [`simulate`] — ground-truth Monte-Carlo over the point process,
//! * [`analytic`] — dominant-interferer lower bounds (quadrature) and
//!   closed-form Jensen approximations,
//! * [`optimize`] — searches for the outage-minimizing exponent s* and the
//!   parameter sweeps behind the standard figure set.
//!
//! The `fpclab` binary in this crate exposes all of it behind a JSON-config
//! CLI that writes CSV tables and optional SVG plots.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod fading;
pub mod numerics;
pub mod optimize;
pub mod simulate;

pub use error::{Error, Result};
