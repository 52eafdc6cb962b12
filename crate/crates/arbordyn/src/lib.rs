//! Finite-state trees over a small alphabet, their dimensions and vertex
//! densities, configuration embeddings, the associated Markov-tree chains,
//! and return-time structure in finite measure-preserving systems.
//!
//! Everything measure-like is exact rational arithmetic; logarithms are the
//! only place doubles appear.

pub mod arith;
pub mod cp;
pub mod detect;
pub mod embed;
pub mod geometry;
pub mod rational;
pub mod report;
pub mod returns;
pub mod treespec;
pub mod verify;

pub use rational::{rat, Int, Rat};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid tree spec: {0}")]
    InvalidSpec(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("word not in tree: {0}")]
    NotInTree(String),
    #[error("horizon exceeded: {0}")]
    HorizonExceeded(String),
    #[error("unsupported for this spec kind: {0}")]
    Unsupported(String),
    #[error("invalid Markov tree: {0}")]
    InvalidMarkovTree(String),
    #[error("invalid measure-preserving system: {0}")]
    InvalidSystem(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
