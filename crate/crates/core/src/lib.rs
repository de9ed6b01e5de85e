//! Sampler-informed kernelization for the maximum independent set problem.

pub mod bench;
pub mod driver;
pub mod error;
pub mod graph;
pub mod kernel;
pub mod metrics;
pub mod rng;
pub mod rydberg;
pub mod sampling;
pub mod selection;
mod search;

pub use error::{Error, Result};

// The guide's snippets compile and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/kernelization.md")]
    mod kernelization {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/rydberg.md")]
    mod rydberg {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
