//! # cohertk
//!
//! Numerical toolkit for the resource theory of quantum coherence in
//! multipartite settings.
//!
//! - [`state`]: pure multipartite states, qubit Bloch vectors and their spectra.
//! - [`channels`]: sparse incoherent Kraus operators and the IU/PIO/SIO/IC
//!   channel classes, including sampling and local products.
//! - [`majorization`]: the majorization predicate and every state-conversion
//!   criterion built on it.
//! - [`slicc`]: LIU equivalence search, two-qubit SLICC classification and
//!   canonical forms with explicit local witnesses.
//! - [`monotones`]: closed-form accessible and source coherence.
//! - [`oracle`]: exact polytope volumes, seeded Monte-Carlo volumes and the
//!   randomized monotonicity / counterexample suites.
//! - [`io`]: JSON file formats for states and channels.
//!
//! Data-parallel loops (Monte-Carlo shards, randomized trials, permutation
//! searches) run on rayon when the `parallel` feature is enabled and fall
//! back to plain iterators otherwise; see [`par::Execution`]. Results never
//! depend on the execution mode.

#![forbid(unsafe_code)]

pub mod channels;
pub mod error;
pub mod io;
pub mod majorization;
pub mod monotones;
pub mod oracle;
pub mod par;
pub mod slicc;
pub mod state;

pub use error::{Error, Result};

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;
