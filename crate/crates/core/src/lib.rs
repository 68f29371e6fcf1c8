//! Extraction of small subgraphs of minimum degree `k` from graphs that
//! exceed the edge threshold `t_k(n) = (k-1)(n-k+2) + C(k-2,2)`, together
//! with the machinery needed to certify and independently verify every run:
//! good-set closure traces, degeneracy peel certificates, cover sets, and
//! brute-force oracles for desk-scale ground truth.
//!
//! The crate is `no_std` + `alloc`; IO, file formats and the CLI live in the
//! companion `mindeg` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(all(feature = "std", not(test)))]
extern crate std;

pub mod conflict;
pub mod cover;
mod error;
pub mod extract;
pub mod gen;
pub mod goodset;
pub mod graph;
pub mod oracle;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
