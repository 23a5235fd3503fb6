//! Image-based visualization and benchmarking for large-scale global
//! optimization.
//!
//! Candidate solutions are laid out as grayscale images (one pixel per
//! decision variable) so that both the decision space and the overall
//! solution quality can be inspected at once. The crate bundles the image
//! comparison metrics used as fitness functions, the mapping functions that
//! turn solutions into images, PSO/DE/GDE3 optimizers with the domain
//! adapters needed for discrete, binary and permutation problems, a set of
//! analytic benchmark functions with known optima, and an experiment runner
//! that logs every iteration and emits image frames and animated timelines.

// negated float comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod error;
pub mod mapping;
pub mod metrics;
pub mod optimizers;
pub mod raster;
pub mod runner;
pub mod schemes;

pub use error::{Error, Result};
