//! Classical toolkit for generalized S-species reaction-diffusion systems.
//!
//! The crate builds mass-action coefficient tensors from reaction networks,
//! discretizes diffusion with periodic Kronecker-sum Laplacians, embeds the
//! resulting polynomial ODE system into a truncated Carleman linear system,
//! integrates both forms with RK4, verifies the linear-combination-of-
//! Hamiltonian-simulation (LCHS) propagator identity by quadrature at small
//! dimension, computes Eyring/Zwanzig reaction rates, and evaluates
//! block-encoding and query-count formulas for the quantum solver.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature enables faster dense kernels. IO, file formats, and the command
//! line live in the companion `crd-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod carleman;
pub mod error;
pub mod estimator;
pub mod integrate;
pub mod lchs;
pub mod models;
pub mod rates;
pub mod reaction;
pub mod sparse;
pub mod spatial;

pub use error::{Error, Result};
