//! Deterministic slotted simulator and kernels for massive machine-type
//! random access.
//!
//! The engine in [`sim`] steps 1 ms TTIs, draws Poisson arrivals and applies
//! ACK/NACK timing with random backoff; access schemes in [`schemes`] decide
//! per-device outcomes. Kernels used by the schemes ([`ff`], [`sparse`],
//! [`capture`]) are usable on their own.

#![no_std]

extern crate alloc;

pub mod capture;
pub mod error;
pub mod ff;
pub mod resource;
pub mod rng;
pub mod schemes;
pub mod sim;
pub mod sparse;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
