//! Pólya threshold graphs.
//!
//! A threshold graph is grown one node at a time: a node is either *universal*
//! (joined to every existing node and to itself) or *isolated*. Here the node
//! types come from the draws of a two-colour Pólya urn, so the creation
//! sequence is exchangeable rather than i.i.d.
//!
//! The crate provides:
//!
//! * [`urn`]: urn parameters, samplers (infinite and finite memory) and exact
//!   joint laws.
//! * [`graph`]: graphs built from creation sequences, degrees, distances and
//!   the weight/threshold characterisation.
//! * [`analytics`]: closed-form degree law, variance, distance law and
//!   expected decay centrality.
//! * [`spectral`]: the Laplacian, its spectrum read off the degrees, and the
//!   realisation-independent eigenbasis, checked in integer arithmetic.
//! * [`consensus`]: linear averaging on connected realisations and the
//!   expected consensus weights, exact or Monte Carlo.
//! * [`oracle`]: brute-force enumeration of `{0,1}^n` used to validate every
//!   closed form.
//! * [`io`]: CSV / JSON emitters used by the command-line driver.
//!
//! Node indices are 1-based throughout, matching the creation order: node `i`
//! is the node added at step `i`.
//!
//! Heavy loops (enumeration, Monte Carlo) run on rayon when the `parallel`
//! feature is enabled. Work is split into fixed chunks and merged in chunk
//! order, so [`Execution::Sequential`] and [`Execution::Parallel`] produce
//! bit-identical results.

pub mod analytics;
pub mod consensus;
mod error;
mod exec;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod rng;
mod special;
pub mod spectral;
pub mod urn;
pub mod validation;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{Distance, ThresholdGraph};
pub use urn::{CreationSequence, DrawLaw, FiniteMemoryParams, UrnParams};
