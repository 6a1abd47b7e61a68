//! Metric learning for categorical data.
//!
//! Categorical examples are first projected into a numeric space by replacing
//! each feature value with the vector of class-conditional probabilities
//! estimated from training counts (a value-difference style encoding). On top
//! of that projection the crate learns a positive semidefinite metric, either
//! one matrix shared across classes or one matrix per class column, by
//! minimizing hinge losses over distance constraints with a Schatten p-norm
//! penalty. Supporting pieces: projected-subgradient training with a
//! backtracking line search, nearest-neighbour and triplet evaluation over
//! repeated splits, and a numerical check of the Rademacher-complexity bound
//! that controls generalization of the learned distances.

pub mod data;
pub mod distance;
pub mod regularizer;
pub mod rng;
pub mod vdm;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// The data itself is unusable (empty cell, single class, size too small
    /// for the requested split, index out of range, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),
    /// A parameter value violates a precondition (p < 1, zero repeats, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Two inputs that must agree in shape do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    /// A numeric operation failed (non-finite values, eigendecomposition).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use data::{generate_synthetic, load_csv, split, CategoricalDataset, SplitSpec, SyntheticSpec};
pub use distance::{
    distance_cpm, distance_cps, euclidean_baseline, pair_diff, MetricKind, MetricModel, PairDiff,
};
pub use regularizer::{psd_project, schatten_subgrad, schatten_value};
pub use vdm::{fit_vdm, project_dataset, project_examples, ProjectedExample, VdmModel};
