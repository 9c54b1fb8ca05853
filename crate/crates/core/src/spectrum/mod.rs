//! Eigenbasis of the commuting family: pseudo-vacuum, recursive kernel
//! vectors, raising, eigenvalues and multiplet counting.

mod alpha;
mod construct;
mod degeneracy;
mod label;

pub use alpha::{alpha_closed_form, tau_candidates, AlphaVariant, TauCandidate};
pub use construct::{
    alpha_nullspace, assign_eigenvalues, build_phi, build_psi, eigenvalue_closed_form, eigenvalue_records, full_basis,
    multiplets, pseudo_vacuum, raise, EigenPacket, EigenvalueRecord, Multiplet, PsiChain, FLOAT_EIGEN_TOL,
};
pub use degeneracy::{
    binomial, cluster_sorted, degeneracy_binomial, degeneracy_bruteforce, hamiltonian_clusters, Cluster, CLUSTER_TOL,
};
pub use label::{enumerate_labels, enumerate_ladders, ladder_spin_twice, StateLabel, Step};

use thiserror::Error;

use crate::model::ModelError;
use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("invalid label {0}")]
    InvalidLabel(String),
    #[error("ansatz vectors are linearly dependent at step ({m},{s})")]
    DependentAnsatz { m: usize, s: usize },
    #[error("no kernel vector at step ({m},{s})")]
    NoSolution { m: usize, s: usize },
    #[error("kernel of dimension {dim} at step ({m},{s})")]
    MultipleSolutions { m: usize, s: usize, dim: usize },
    #[error("{0} is raised past the top of its multiplet")]
    RaisedToZero(String),
    #[error("{label} is not an eigenvector of C^({n}) (residual {residual:e})")]
    NotEigenvector { label: String, n: usize, residual: f64 },
    #[error("closed form gives {closed} but C^({n}) gives {verified}")]
    ClosedFormMismatch { n: usize, closed: String, verified: String },
    #[error("vanishing denominator in closed form at i = {0}")]
    ZeroDenominator(usize),
    #[error("closed form needs 1 <= dm <= {max}, got {dm}")]
    BadDeltaM { dm: usize, max: usize },
    #[error("weight sector {weight}: rank {rank}, expected {expected}")]
    RankDeficient { weight: i64, rank: usize, expected: usize },
    #[error("ambiguous clustering: relative gap {0:e}")]
    ClusterAmbiguity(f64),
    #[error("degeneracy formula needs j = 1/2 and 0 <= l <= N, got N = {n}, l = {l}")]
    FormulaDomain { n: usize, l: i64 },
    #[error("eigen solver failed in sector {0}")]
    Solver(i64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}
