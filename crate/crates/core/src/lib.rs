//! Probabilistic reparameterization of binary integer linear programs.
//!
//! A binary ILP `min c·x s.t. Ax ≤ b` is relaxed to a product Bernoulli
//! parameter `x̂ ∈ [0,1]^d` with an expected hinge penalty. That penalty is
//! sampled through the logistic reparameterization, and a pathwise gradient
//! estimator is built from a soft relaxation gated by the hard sample. This
//! crate computes every piece exactly or by Monte Carlo. It measures how far
//! the estimator's mean is from the true gradient, and shows that in two
//! dimensions its mean field is not a gradient field at all.
//!
//! Modules:
//! * [`ilp`]: instances, exhaustive solving, the penalty threshold `μ*`;
//! * [`penalty`]: exact expected penalties, their gradients, grid scans;
//! * [`reparam`]: logistic CDF/quantile, hard and soft samples, seeded noise;
//! * [`estimators`]: per-sample losses, the pathwise estimator, CRN Monte Carlo;
//! * [`closed_forms`]: `f₁`, 1D/2D potentials and fields, curl, circulation;
//! * [`dynamics`]: projected SGD under a pluggable estimator.

// range guards are negated so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod ilp;
pub mod penalty;
pub mod quadrature;
pub mod reparam;
pub mod table;

pub use error::{Error, Result};
pub use ilp::{BinaryPoint, IlpInstance, SolveReport};
pub use penalty::{PenaltyConfig, RelaxedPoint};
pub use reparam::{NoiseVector, SeededSampler};
