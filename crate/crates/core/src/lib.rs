//! Link prediction on heterogeneous graphs.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod hetgraph;
pub mod ingest;
pub mod kernels;
pub mod learn;
pub mod pipeline;
pub mod rng;
pub mod sage;
pub mod skipgram;
pub mod walks;

pub use error::{Error, Result};
