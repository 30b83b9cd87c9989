use std::fmt;

use thiserror::Error;

/// Which of the two cell populations a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Population {
    Tumour,
    Ctl,
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Population::Tumour => f.write_str("tumour"),
            Population::Ctl => f.write_str("CTL"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// An argument lies outside the domain on which an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameters or initial data, detected before any stepping.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("length mismatch: expected {expected} sites, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// A per-step fate probability left [0, 1].
    #[error(
        "time-step too large: {population} {which} probability {value} at site {site} (step {step})"
    )]
    TimeStepTooLarge {
        population: Population,
        which: &'static str,
        site: usize,
        step: usize,
        value: f64,
    },
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
