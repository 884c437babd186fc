//! Analog joint source-channel codes over AWGN channels.
//!
//! A block of uniform source samples is split into binary bit planes, the
//! planes are regrouped into per-level streams, each level is protected by a
//! binary component code, and the coded levels are superimposed with
//! geometrically decaying weights into real channel symbols. The receiver
//! peels levels off one at a time: decode, re-encode, subtract, rescale.
//!
//! The crate provides the encoder/decoder pipeline ([`bitplane`], [`map`],
//! [`code`], [`scdec`]), the channel and noise models ([`channel`]), analytic
//! distortion bounds ([`bounds`]), and a reproducible Monte Carlo sweep
//! harness ([`sim`]). Monte Carlo trials run on a rayon pool when the
//! `parallel` feature (default) is enabled; a sequential path is always
//! available and produces bit-identical results.

// Domain guards are written `!(x > 0.0)` so NaN arguments fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bitplane;
pub mod bounds;
pub mod channel;
pub mod code;
pub mod map;
pub mod numerics;
pub mod rng;
pub mod scdec;
pub mod sim;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Dimensions of the supplied data do not match.
    #[error("shape error: {0}")]
    Shape(String),
    /// An invalid combination of configuration parameters.
    #[error("configuration error: {0}")]
    Config(String),
    /// The request is valid but exceeds what the implementation supports.
    #[error("capability error: {0}")]
    Capability(String),
    /// A numerical routine failed to reach its accuracy target.
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
