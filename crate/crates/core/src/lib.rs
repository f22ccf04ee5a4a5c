//! Sparse Ising priors over binary attribute matrices, and Markov-blanket
//! correction of latent-space attribute manipulation vectors.
//!
//! The pipeline:
//!
//! 1. [`attr_io`] parses attribute matrices (CelebA attribute-list format)
//!    and latent embedding matrices (CSV or LATM raw binary).
//! 2. [`elasso`] fits one l1-penalized logistic regression per attribute
//!    along a penalty path and selects each node's model by EBIC.
//! 3. [`graph`] symmetrizes the nodewise fits into an undirected weighted
//!    graph with the AND rule, sweeps the EBIC gamma by the connectivity
//!    criterion, and can evaluate or exactly sample the joint model.
//! 4. [`debias`] computes per-attribute latent manipulation vectors,
//!    subtracts each attribute's Markov-blanket spill-over, and correlates
//!    edge weights against the cosine distances of the vectors.
//! 5. [`export`] writes GraphML/DOT/edge-CSV views and a JSON graph document
//!    that round-trips exactly.
//!
//! With the default `parallel` feature the nodewise fits, the gamma sweep
//! and the per-attribute vector computation run on the rayon pool. Disabling
//! it gives a sequential build with bit-identical results.

pub mod attr_io;
pub mod debias;
pub mod elasso;
pub mod error;
pub mod export;
pub mod graph;
pub mod stats;

pub use error::{Error, Result};
