//! Markov and covariance interpolation with input-to-state filters.
//!
//! Given a filter `(A, B)` with transfer `G(z) = (I - zA)^{-1}B`, a target
//! state covariance `Σ` and a state-Markov vector `H`, [`interp::solve`]
//! finds the largest input variance `Λ` and a transfer function
//! `W = σG/ξG` with `Λ⟨GW, GW⟩ = Σ` and `⟨G, W⟩ = H`.
//! [`realize`] turns the result into polynomial and state-space models and
//! re-checks both interpolation conditions, and [`reduction`] wires it all
//! into a model-reduction pipeline.
//!
//! Transfer functions use the delay convention throughout: power series in
//! `z` that are analytic in the unit disc, so a stable denominator has all
//! its roots outside the disc.

// `!(x > y)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod filter;
pub mod format;
pub mod interp;
pub mod numkit;
pub mod realize;
pub mod reduction;

pub use error::{Error, Result};
