//! Simulator and analysis toolkit for counterfactual optical communication
//! protocols.
//!
//! The crate propagates single-photon probability amplitudes (and, with the
//! same numbers but different event semantics, classical field intensities)
//! through linear-optical interferometer networks, builds the standard
//! counterfactual-communication protocol circuits, and decides whether a
//! given bit transfer was counterfactual under three different criteria:
//! channel-crossing accounting, first-order weak trace (two-state-vector
//! formalism), and consistent-histories classification. A derivative-free
//! tuner solves for beamsplitter angles that equalize losses across
//! Bob's two actions.
//!
//! Modules:
//!
//! - [`optics`]: modes, states, elements, circuits, Fock vs classical runs
//! - [`protocols`]: circuit builders for the protocol zoo plus bit decoding
//! - [`counterfactuality`]: crossing, weak trace, histories, loss statistics
//! - [`tuner`]: equal-loss angle solver (bounded Nelder-Mead simplex)
//! - [`harness`]: config parsing, report emission, CLI command bodies
//!
//! Everything is deterministic: no randomness, stable (sorted) map orders
//! everywhere a number is emitted, and sweep concurrency that never
//! affects output order.

pub mod counterfactuality;
pub mod harness;
pub mod optics;
pub mod protocols;
pub mod tuner;
