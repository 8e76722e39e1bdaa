//! Shared error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(u32, u32),

    #[error("arity mismatch: polynomial in {expected} variables evaluated at {got} coordinates")]
    Arity { expected: usize, got: usize },

    #[error("search box too large: ({side})^{vars} = {points} points exceeds limit {limit}")]
    BoxTooLarge {
        side: u64,
        vars: usize,
        points: u128,
        limit: u128,
    },

    #[error("memory guard exceeded at word length {depth}: {entries} table entries / {stored} stored matrix entries (caps {entry_cap} / {stored_cap})")]
    Resource {
        depth: usize,
        entries: usize,
        stored: usize,
        entry_cap: usize,
        stored_cap: usize,
    },

    #[error("gadget level {found} not accepted by {op} (expected {expected})")]
    Level {
        op: &'static str,
        expected: &'static str,
        found: &'static str,
    },

    #[error("degree-{0} polynomial rejected at subword level; pass allow_deg1 to build it anyway")]
    DegreeTooLow(u32),

    #[error("generating set is not symmetric: inverse of a generator is missing or carries a different weight")]
    NotSymmetric,

    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("invalid JSON: {0}")]
    Json(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
