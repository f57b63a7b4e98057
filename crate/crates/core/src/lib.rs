//! Matrix-free spectral analysis of the Google matrix of large directed
//! networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: compressed forward/backward adjacency, edge-list and label
//!   loading, binary cache, summary statistics.
//! - [`operator`]: the column-stochastic link operator `S` (or `S*` for the
//!   inverted network) and the Google matrix `G(α) = αS + (1-α)/N`, applied
//!   without materialising dangling or teleport columns.
//! - [`subspaces`]: exact split of the nodes into invariant subspaces and the
//!   core space, with dense diagonalisation of every subspace block.
//! - [`arnoldi`]: Krylov projection of the core block `S_cc` onto a small
//!   Hessenberg matrix, Ritz values and Ritz vectors.
//! - [`rank`]: PageRank / CheiRank by power iteration, the `α → 1` variant
//!   and log-log power-law fits.
//! - [`analysis`]: correlator, inverse participation ratio, decay exponents,
//!   rank-cut link counts, density grids and community word counts.
//! - [`export`]: the CSV / JSON tables emitted by the command-line driver.
//!
//! Inner loops run on rayon when the `parallel` feature is enabled (the
//! default) and sequentially otherwise; see [`exec`].

pub mod analysis;
pub mod arnoldi;
pub mod dense;
pub mod error;
pub mod exec;
pub mod export;
pub mod graph;
pub mod operator;
pub mod rank;
pub mod subspaces;
pub mod synth;

pub use num_complex::Complex64;

pub use crate::arnoldi::{
    arnoldi_iterate, core_spectrum, hessenberg_eigen, ritz_vectors, ArnoldiOptions, CoreSpectrum,
    CoreSpectrumConfig, EigenPair, HessenbergMatrix, KrylovBasis, RitzValue,
};
pub use crate::error::{Error, Result};
pub use crate::exec::Execution;
pub use crate::graph::{
    load_edge_list, load_labels, DirectedGraph, Direction, EdgeListOptions, GraphStats, LabelTable,
    NodeId,
};
pub use crate::operator::{CoreOperator, LinearOperator, StochasticOperator};
pub use crate::rank::{cheirank, pagerank, pagerank_near_one, zipf_fit, FitResult, RankVector};
pub use crate::subspaces::{
    count_unit_eigenvalues, detect_subspaces, subspace_spectrum, SpectrumSummary,
    SubspaceDecomposition,
};
