//! Election-shock identification and local-projection impulse responses.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`ingest`] parses prediction-market quotes, asset prices, vintage-stamped
//!    macro releases and the release calendar.
//! 2. [`shockgen`] regresses the Republican win probability on its own lags and
//!    on financial/macro news, and keeps the residual as the election shock.
//! 3. [`lp`] estimates weighted long-difference local projections of asset
//!    prices (or monthly employment) on the shock, with Newey-West standard
//!    errors from [`regress`].
//! 4. [`cli`] chains the stages from a declarative config and writes CSV and
//!    SVG outputs.
//!
//! [`synth`] holds known-truth data-generating processes and brute-force
//! oracles used to validate the estimators.

pub mod cli;
pub mod error;
pub mod ingest;
pub mod lp;
pub mod regress;
pub mod shockgen;
pub mod synth;
pub mod timeline;

pub use error::{Error, Result};
