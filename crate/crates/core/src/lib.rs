//! Compound channel capacities.
//!
//! Two families of compound channels are covered:
//!
//! - finite sets of classical discrete memoryless channels, where the capacity
//!   is the max-min mutual information `max_p min_s I(p; W_s)`;
//! - Gaussian classical-quantum channels (unknown noise, phase or attenuation),
//!   both through their closed-form `g`-formulas and through constellation
//!   lower bounds evaluated in a truncated Fock space.
//!
//! The [`kennedy`] module studies the classical channels induced by a Kennedy
//! receiver on a compound pure-loss channel, and [`bounds`] evaluates the
//! truncation and tail estimates that make the Fock-space numerics sound.
//!
//! All capacities and entropies are reported in bits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod capacity;
mod error;
pub mod fock;
pub mod kennedy;
mod linalg;
pub mod verify;

pub use error::{Error, Result};

pub use capacity::{
    binary_entropy, compound_capacity, dmc_capacity, g, holevo_quantity, mutual_information,
    CapacityResult, CompoundSet, Prior, StopReason, Dmc,
};
pub use fock::{
    CoherentAmplitude, GaussianChannelParams, TruncatedState, coherent_vector,
    gaussian_channel_output, mean_photon_number, thermal_state, von_neumann_entropy,
};
